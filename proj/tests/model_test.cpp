#include <doctest.h>

#include <cmath>

#include "simulmt/decoder.hpp"
#include "simulmt/model.hpp"
#include "simulmt/rng.hpp"

using namespace simulmt;

namespace {

std::shared_ptr<TransducerModel> abc_model(int d, double q, std::set<Token> ambiguous = {}) {
  return std::make_shared<TransducerModel>(
      std::map<Token, Token>{{"a", "A"}, {"b", "B"}, {"c", "C"}}, d, "UM", q,
      std::move(ambiguous));
}

Sentence random_sentence(Rng& rng, const std::vector<Token>& alphabet, int max_len) {
  Sentence s;
  int len = rng.range(0, max_len);
  for (int i = 0; i < len; ++i) s.push_back(alphabet[rng.below(alphabet.size())]);
  return s;
}

}  // namespace

TEST_CASE("echo model streams the identity mapping") {
  auto echo = make_echo_model({"a", "b", "c"});
  Distribution dist = echo->next_distribution({"a", "b"}, {"a"});
  CHECK(dist.prob("b") == doctest::Approx(1.0));
  CHECK(dist.argmax() == "b");
}

TEST_CASE("distributions sum to one across regimes") {
  Rng rng(5);
  std::vector<Token> alphabet = {"a", "b", "c"};
  for (double q : {0.6, 0.7, 0.9, 1.0}) {
    for (int d : {0, 1, 2}) {
      auto model = abc_model(d, q, {"a"});
      for (int i = 0; i < 100; ++i) {
        Sentence src = random_sentence(rng, alphabet, 5);
        if (rng.below(2)) src.push_back(kEos);
        Sentence tgt = random_sentence(rng, {"A", "B", "C", "UM"}, 4);
        Distribution dist = model->next_distribution(src, tgt);
        CHECK(dist.sum() == doctest::Approx(1.0).epsilon(1e-9));
        for (const auto& [tok, p] : dist.entries()) CHECK(p >= 0.0);
      }
    }
  }
}

TEST_CASE("equal arguments produce equal distributions") {
  Rng rng(6);
  auto model = abc_model(1, 0.7);
  std::vector<Token> alphabet = {"a", "b", "c"};
  for (int i = 0; i < 100; ++i) {
    Sentence src = random_sentence(rng, alphabet, 5);
    Sentence tgt = random_sentence(rng, {"A", "B", "C", "UM"}, 4);
    Distribution d1 = model->next_distribution(src, tgt);
    Distribution d2 = model->next_distribution(src, tgt);
    REQUIRE(d1.entries().size() == d2.entries().size());
    for (std::size_t j = 0; j < d1.entries().size(); ++j) {
      CHECK(d1.entries()[j].first == d2.entries()[j].first);
      CHECK(d1.entries()[j].second == d2.entries()[j].second);
    }
  }
}

TEST_CASE("resolved positions prefer the table mapping") {
  auto model = abc_model(1, 0.7);
  // x_{t+d} visible: the aligned mapping carries mass q.
  Distribution dist = model->next_distribution({"a", "b"}, {});
  CHECK(dist.prob("A") == doctest::Approx(0.7));
  CHECK(dist.argmax() == "A");
}

TEST_CASE("aligned but unresolved positions guess the default token") {
  auto model = abc_model(1, 0.7);
  // x_1 seen, x_2 not: speculative default with the sharpness-driven split.
  Distribution dist = model->next_distribution({"a"}, {});
  double u = 0.4 * 0.4;
  CHECK(dist.prob("UM") == doctest::Approx((1.0 - u) * 0.7));
  CHECK(dist.prob(kEos) == doctest::Approx(u));
  CHECK(dist.argmax() == "UM");
}

TEST_CASE("a sharp model declines to speculate") {
  auto model = abc_model(1, 1.0);
  Distribution dist = model->next_distribution({"a"}, {});
  CHECK(dist.prob(kEos) == doctest::Approx(1.0));
  // Used by the threshold policy example: top mass still clears rho = 0.5.
  auto q09 = abc_model(1, 0.9);
  Distribution probe = q09->next_distribution({"a"}, {});
  double top = 0.0;
  for (const auto& [tok, p] : probe.entries()) top = std::max(top, p);
  CHECK(top >= 0.5);
}

TEST_CASE("beyond the frontier the guess tracks the newest source token") {
  auto model = abc_model(2, 0.7);
  Distribution dist = model->next_distribution({"b"}, {"X"});
  // t=2 > m=1: speculation reuses table[x_m].
  CHECK(dist.argmax() == "B");
  // Far past the frontier the model wants to stop.
  Distribution stop = model->next_distribution({"b"}, {"B", "B", "B"});
  CHECK(stop.argmax() == kEos);
}

TEST_CASE("complete sources resolve everything and then end") {
  auto model = abc_model(2, 0.7);
  Distribution mid = model->next_distribution({"a", "b", kEos}, {"A"});
  CHECK(mid.argmax() == "B");
  Distribution end = model->next_distribution({"a", "b", kEos}, {"A", "B"});
  CHECK(end.argmax() == kEos);
  CHECK(end.prob(kEos) == doctest::Approx(0.7));
}

TEST_CASE("ambiguous tokens put the decoy ahead of the truth") {
  auto model = abc_model(0, 0.7, {"b"});
  Distribution dist = model->next_distribution({"b", kEos}, {});
  CHECK(dist.prob("UM") == doctest::Approx(0.6));
  CHECK(dist.prob("B") == doctest::Approx(0.28));
  CHECK(dist.argmax() == "UM");
  // The decoy mass vanishes for a sharp model.
  auto sharp = abc_model(0, 1.0, {"b"});
  CHECK(sharp->next_distribution({"b", kEos}, {}).prob("B") == doctest::Approx(1.0));
}

TEST_CASE("going off the rails damps the distribution") {
  auto model = abc_model(0, 0.7);
  Distribution on_track = model->next_distribution({"a", "b", kEos}, {"A"});
  Distribution lost = model->next_distribution({"a", "b", kEos}, {"C"});
  CHECK(on_track.prob("B") == doctest::Approx(0.7));
  CHECK(lost.prob("B") == doctest::Approx(0.5 * 0.7 + 0.5 / 5.0));
  CHECK(lost.argmax() == "B");
}

TEST_CASE("unknown source tokens are named in the error") {
  auto model = abc_model(0, 0.7);
  try {
    model->next_distribution({"zz"}, {});
    CHECK(false);
  } catch (const ModelError& e) {
    CHECK(std::string(e.what()).find("zz") != std::string::npos);
  }
}

TEST_CASE("a finished target prefix cannot be extended") {
  auto model = abc_model(0, 0.7);
  CHECK_THROWS_AS(model->next_distribution({"a"}, {"A", kEos}), ModelError);
}

TEST_CASE("greedy full decode equals the table map for every short source") {
  auto model = abc_model(1, 0.7);
  std::vector<Token> alphabet = {"a", "b", "c"};
  std::vector<Sentence> sources = {{}};
  for (int len = 1; len <= 6; ++len) {
    std::vector<Sentence> next;
    for (const Sentence& s : sources) {
      for (const Token& t : alphabet) {
        Sentence grown = s;
        grown.push_back(t);
        next.push_back(grown);
      }
    }
    for (const Sentence& src : next) {
      Sentence out = full_sentence_decode(*model, src, 1);
      CHECK(out == model->reference_for(src));
    }
    sources = std::move(next);
  }
}

TEST_CASE("full sentence decode follows the table with lookahead") {
  auto model = std::make_shared<TransducerModel>(
      std::map<Token, Token>{{"a", "A"}, {"b", "B"}}, 1, "UM", 1.0);
  CHECK(full_sentence_decode(*model, {"a", "b"}, 1) == Sentence{"A", "B"});
  auto echo = make_echo_model({"a", "b", "c"});
  CHECK(full_sentence_decode(*echo, {"a", "b", "c"}, 1) == Sentence{"a", "b", "c"});
}

TEST_CASE("wider beams never score worse at equal depth") {
  auto model = abc_model(1, 0.7, {"a"});
  for (const Sentence& src : {Sentence{"a", "b"}, Sentence{"b", "c", "a"}}) {
    Sentence view = src;
    view.push_back(kEos);
    Beam b1{{Hypothesis{{}, 0.0, false}}};
    Beam b3 = b1;
    b1 = beam_advance(b1, 4, 1, *model, view);
    b3 = beam_advance(b3, 4, 3, *model, view);
    CHECK(b3.items.front().logprob >= b1.items.front().logprob);
  }
}
