#include "simulmt/model.hpp"

#include <algorithm>
#include <cmath>

namespace simulmt {

Distribution::Distribution(std::vector<std::pair<Token, double>> entries, bool normalize)
    : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < entries_.size(); ++i)
    if (entries_[i].first == entries_[i - 1].first)
      throw ModelError("duplicate token in distribution: '" + entries_[i].first + "'");
  if (normalize) {
    double s = sum();
    if (s <= 0.0) throw ModelError("cannot normalize a zero-mass distribution");
    for (auto& e : entries_) e.second /= s;
  }
}

double Distribution::prob(const Token& t) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), t,
      [](const auto& e, const Token& key) { return e.first < key; });
  if (it != entries_.end() && it->first == t) return it->second;
  return 0.0;
}

const Token& Distribution::argmax() const {
  if (entries_.empty()) throw ModelError("argmax of empty distribution");
  const auto* best = &entries_.front();
  for (const auto& e : entries_)
    if (e.second > best->second) best = &e;
  return best->first;
}

const Token& Distribution::argmax_excluding_eos() const {
  const std::pair<Token, double>* best = nullptr;
  for (const auto& e : entries_) {
    if (is_eos(e.first)) continue;
    if (!best || e.second > best->second) best = &e;
  }
  if (!best) throw ModelError("no non-EOS token in distribution");
  return best->first;
}

std::vector<std::pair<Token, double>> Distribution::top_k(std::size_t k) const {
  auto sorted = entries_;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (sorted.size() > k) sorted.resize(k);
  return sorted;
}

double Distribution::sum() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.second;
  return s;
}

TransducerModel::TransducerModel(std::map<Token, Token> table, int lookahead,
                                 Token default_token, double sharpness,
                                 std::set<Token> ambiguous, int guess_band)
    : table_(std::move(table)),
      lookahead_(lookahead),
      default_token_(std::move(default_token)),
      sharpness_(sharpness),
      ambiguous_(std::move(ambiguous)),
      guess_band_(guess_band) {
  if (table_.empty()) throw ModelError("transducer table is empty");
  if (lookahead_ < 0) throw ModelError("negative lookahead");
  if (guess_band_ < 0) throw ModelError("negative guess band");
  if (!(sharpness_ > 0.5 && sharpness_ <= 1.0))
    throw ModelError("sharpness must lie in (0.5, 1]");
  check_token(default_token_);
  std::set<Token> vocab;
  for (const auto& [src, tgt] : table_) {
    check_token(src);
    check_token(tgt);
    vocab.insert(tgt);
  }
  vocab.insert(default_token_);
  vocab_.assign(vocab.begin(), vocab.end());
}

const Token& TransducerModel::mapped(const Token& source_token) const {
  auto it = table_.find(source_token);
  if (it == table_.end())
    throw ModelError("unknown source token '" + source_token + "'");
  return it->second;
}

namespace {

// Assembles a distribution from (token, mass) pairs plus a residue spread
// uniformly over the remaining symbols. If nothing remains, the residue goes
// to the first pinned token.
Distribution assemble(const std::vector<Token>& vocab,
                      std::vector<std::pair<Token, double>> pinned, double residue) {
  std::vector<std::pair<Token, double>> entries;
  entries.reserve(vocab.size() + 1);
  auto pinned_mass = [&pinned](const Token& t) -> double* {
    for (auto& p : pinned)
      if (p.first == t) return &p.second;
    return nullptr;
  };
  std::size_t free_count = 0;
  for (const Token& t : vocab)
    if (!pinned_mass(t)) ++free_count;
  if (!pinned_mass(kEos)) ++free_count;

  if (free_count == 0) {
    pinned.front().second += residue;
    residue = 0.0;
  }
  double share = free_count ? residue / static_cast<double>(free_count) : 0.0;
  for (const Token& t : vocab)
    entries.emplace_back(t, pinned_mass(t) ? *pinned_mass(t) : share);
  entries.emplace_back(kEos, pinned_mass(kEos) ? *pinned_mass(kEos) : share);
  return Distribution(std::move(entries));
}

}  // namespace

Distribution TransducerModel::next_distribution(const Sentence& source_prefix,
                                                const Sentence& target_prefix) const {
  check_sentence(source_prefix);
  if (ends_with_eos(target_prefix))
    throw ModelError("target prefix already ended");

  const bool complete = ends_with_eos(source_prefix);
  const int m = static_cast<int>(content_size(source_prefix));
  const int t = static_cast<int>(target_prefix.size()) + 1;
  const double q = sharpness_;
  const double u = (2.0 * q - 1.0) * (2.0 * q - 1.0);

  for (int i = 0; i < m; ++i) mapped(source_prefix[i]);  // reject unknown input

  auto resolved = [&](int pos) { return complete || pos + lookahead_ <= m; };

  // Off the rails once any resolved position of the prefix disagrees with the
  // model's expectation (ambiguous tokens expect their true mapping).
  bool lost = false;
  for (int i = 1; i <= static_cast<int>(target_prefix.size()) && !lost; ++i) {
    if (complete && i > m) {
      lost = true;  // kept generating past the full translation
    } else if (i <= m && resolved(i)) {
      if (target_prefix[i - 1] != mapped(source_prefix[i - 1])) lost = true;
    }
  }

  std::vector<std::pair<Token, double>> pinned;
  double residue = 0.0;
  if (complete && t > m) {
    pinned = {{kEos, q}};
    residue = 1.0 - q;
  } else if (resolved(t)) {
    // Source content remains untranslated, so ending here gets no mass.
    const Token& truth = mapped(source_prefix[t - 1]);
    if (ambiguous_.count(source_prefix[t - 1]) && truth != default_token_) {
      // Garden path: the decoy outranks the truth one step at a time.
      pinned = {{default_token_, 2.0 * (1.0 - q)},
                {truth, q * (2.0 * q - 1.0)},
                {kEos, 0.0}};
      residue = (2.0 * q - 1.0) * (1.0 - q);
    } else {
      pinned = {{truth, q}, {kEos, 0.0}};
      residue = 1.0 - q;
    }
  } else if (t <= m || (t - m <= guess_band_ && m >= 1)) {
    const Token& guess = t <= m ? default_token_ : mapped(source_prefix[m - 1]);
    pinned = {{guess, (1.0 - u) * q}, {kEos, u}};
    residue = (1.0 - u) * (1.0 - q);
  } else {
    pinned = {{kEos, u + (1.0 - u) * q}};
    residue = (1.0 - u) * (1.0 - q);
  }

  Distribution base = assemble(vocab_, std::move(pinned), residue);
  if (!lost) return base;

  const double uniform = 1.0 / static_cast<double>(vocab_.size() + 1);
  std::vector<std::pair<Token, double>> mixed;
  mixed.reserve(base.entries().size());
  for (const auto& [tok, p] : base.entries())
    mixed.emplace_back(tok, 0.5 * p + 0.5 * uniform);
  return Distribution(std::move(mixed));
}

Sentence TransducerModel::reference_for(const Sentence& source) const {
  Sentence out;
  out.reserve(source.size());
  for (const Token& t : source) {
    if (is_eos(t)) break;
    out.push_back(mapped(t));
  }
  return out;
}

std::shared_ptr<TransducerModel> make_echo_model(const std::vector<Token>& alphabet) {
  std::map<Token, Token> table;
  for (const Token& t : alphabet) table[t] = t;
  return std::make_shared<TransducerModel>(std::move(table), 0, "<unk>", 1.0);
}

}  // namespace simulmt
