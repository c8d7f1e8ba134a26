#include <doctest.h>

#include "simulmt/model.hpp"
#include "simulmt/policy.hpp"

using namespace simulmt;

namespace {

PolicyState state_of(int s, int t, int len, const IncrementalModel* model = nullptr,
                     const Sentence* src = nullptr, const Sentence* committed = nullptr,
                     int run = 0) {
  PolicyState ps;
  ps.source_read = s;
  ps.committed = t;
  ps.source_len = len;
  ps.run_length = run;
  ps.model = model;
  ps.source_prefix = src;
  ps.committed_prefix = committed;
  return ps;
}

}  // namespace

TEST_CASE("wait-k schedule") {
  WaitKPolicy k3(3);
  CHECK(k3.decide(state_of(2, 0, 10)) == Action::Read);
  CHECK(k3.decide(state_of(3, 0, 10)) == Action::Write);

  WaitKPolicy k1(1);
  CHECK(k1.g_of(1, 5) == 1);
  WaitKPolicy k5(5);
  CHECK(k5.g_of(4, 6) == 6);
  CHECK(WaitKPolicy(3).g_of(2, 10) == 4);
}

TEST_CASE("wait-k emits exactly g(t) reads before the t-th write") {
  for (int k : {1, 2, 3, 5}) {
    WaitKPolicy policy(k);
    const int len = 12;
    int s = 0;
    int t = 0;
    std::vector<int> reads_before_write;
    while (s < len) {
      // The engine always reads first; afterwards the policy decides.
      if (s == 0 || policy.decide(state_of(s, t, len)) == Action::Read) {
        ++s;
        continue;
      }
      ++t;
      reads_before_write.push_back(s);
    }
    for (int i = 0; i < static_cast<int>(reads_before_write.size()); ++i)
      CHECK(reads_before_write[static_cast<std::size_t>(i)] == policy.g_of(i + 1, len));
  }
}

TEST_CASE("threshold policy writes when the model is confident") {
  auto model = std::make_shared<TransducerModel>(
      std::map<Token, Token>{{"a", "A"}, {"b", "B"}}, 1, "UM", 0.9);
  Sentence src = {"a"};
  Sentence committed = {};
  ThresholdPolicy policy(0.5);
  CHECK(policy.decide(state_of(1, 0, 4, model.get(), &src, &committed)) == Action::Write);
}

TEST_CASE("threshold guards: k_min forces reads, cap forces a break") {
  auto model = std::make_shared<TransducerModel>(
      std::map<Token, Token>{{"a", "A"}}, 0, "UM", 0.9);
  Sentence src = {"a", "a"};
  Sentence committed = {};
  ThresholdPolicy policy(1e-9, /*k_min=*/2, /*cap=*/3);
  CHECK(policy.decide(state_of(1, 0, 9, model.get(), &src, &committed)) == Action::Read);
  CHECK(policy.decide(state_of(2, 0, 9, model.get(), &src, &committed)) == Action::Write);
  CHECK(policy.decide(state_of(2, 3, 9, model.get(), &src, &committed, 3)) == Action::Read);
}

TEST_CASE("threshold above the top probability reads to the end") {
  auto model = std::make_shared<TransducerModel>(
      std::map<Token, Token>{{"a", "A"}}, 0, "UM", 0.9);
  Sentence committed = {};
  ThresholdPolicy policy(0.95);
  for (int s = 1; s < 6; ++s) {
    Sentence src(static_cast<std::size_t>(s), "a");
    CHECK(policy.decide(state_of(s, 0, 6, model.get(), &src, &committed)) == Action::Read);
  }
  // All source read: the engine finishes regardless of the policy.
  CHECK(policy.decide(state_of(6, 0, 6, model.get(), &committed, &committed)) ==
        Action::Write);
}

TEST_CASE("policy construction rejects bad parameters") {
  CHECK_THROWS(WaitKPolicy(0));
  CHECK_THROWS(ThresholdPolicy(0.0));
  CHECK_THROWS(ThresholdPolicy(1.0));
  CHECK_THROWS(ThresholdPolicy(0.5, 0));
}
