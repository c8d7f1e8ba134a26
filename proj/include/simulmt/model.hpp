#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "simulmt/types.hpp"

namespace simulmt {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Next-token distribution over vocabulary ∪ {EOS}. Entries are kept sorted by
// token text so iteration, argmax ties and serialized output are stable.
class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(std::vector<std::pair<Token, double>> entries,
                        bool normalize = false);

  double prob(const Token& t) const;
  // Highest-probability token; ties go to the lexicographically smallest.
  const Token& argmax() const;
  const Token& argmax_excluding_eos() const;
  std::vector<std::pair<Token, double>> top_k(std::size_t k) const;

  const std::vector<std::pair<Token, double>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  double sum() const;

 private:
  std::vector<std::pair<Token, double>> entries_;  // sorted by token text
};

// Scores the next target token given what has been read of the source and
// what has been emitted so far. Implementations must be pure: equal arguments
// always produce equal distributions. A source prefix whose final element is
// EOS is complete; anything else may still grow.
class IncrementalModel {
 public:
  virtual ~IncrementalModel() = default;
  virtual Distribution next_distribution(const Sentence& source_prefix,
                                         const Sentence& target_prefix) const = 0;
  virtual const std::vector<Token>& vocabulary() const = 0;
};

// Deterministic table-driven stand-in for a translation model.
//
// Given m visible source tokens, position t is "resolved" once the source is
// complete or x_{t+d} has been seen; resolved positions put mass q on
// table[x_t]. Unresolved positions speculate: mass (1-u)*q on a guess token
// and mass u on EOS, with u = (2q-1)^2, so a q=1 model refuses to speculate
// (all mass on EOS) while a soft model fills its window with guesses that
// later steps revise. The guess is default_token while the position is
// aligned with seen source (t <= m) and table[x_m] beyond the frontier;
// speculation stops guess_band tokens past the frontier.
//
// Two opt-in behaviors create the ambiguity a beam search can exploit:
//  - ambiguous source tokens: resolved, they put mass 2(1-q) on the
//    default_token decoy and only q(2q-1) on the true mapping, so a greedy
//    decoder takes the decoy while deeper search recovers;
//  - off-rails damping: once the target prefix contradicts a resolved
//    expectation, distributions are mixed halfway to uniform, collapsing the
//    scores of hypotheses that took a decoy.
class TransducerModel : public IncrementalModel {
 public:
  TransducerModel(std::map<Token, Token> table, int lookahead, Token default_token,
                  double sharpness, std::set<Token> ambiguous = {},
                  int guess_band = 2);

  Distribution next_distribution(const Sentence& source_prefix,
                                 const Sentence& target_prefix) const override;
  const std::vector<Token>& vocabulary() const override { return vocab_; }

  const std::map<Token, Token>& table() const { return table_; }
  int lookahead() const { return lookahead_; }
  double sharpness() const { return sharpness_; }
  const Token& default_token() const { return default_token_; }

  // The target the model converges to on a complete source.
  Sentence reference_for(const Sentence& source) const;

 private:
  const Token& mapped(const Token& source_token) const;

  std::map<Token, Token> table_;
  int lookahead_ = 0;
  Token default_token_;
  double sharpness_ = 1.0;
  std::set<Token> ambiguous_;
  int guess_band_ = 2;
  std::vector<Token> vocab_;  // table range ∪ {default}, sorted
};

// Identity transducer: streams each source token straight through.
std::shared_ptr<TransducerModel> make_echo_model(const std::vector<Token>& alphabet);

}  // namespace simulmt
