#pragma once

#include <memory>

#include "simulmt/model.hpp"
#include "simulmt/types.hpp"

namespace simulmt {

enum class Action { Read, Write };

// Everything a policy may look at. committed_prefix deliberately excludes
// the revisable window: decisions must not depend on content that can still
// change. run_length counts consecutive writes since the last read.
struct PolicyState {
  int source_read = 0;
  int committed = 0;
  int source_len = 0;
  int run_length = 0;
  const IncrementalModel* model = nullptr;
  const Sentence* source_prefix = nullptr;
  const Sentence* committed_prefix = nullptr;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual Action decide(const PolicyState& state) const = 0;
  virtual std::string name() const = 0;
};

// Fixed schedule: read k tokens, then alternate write/read.
class WaitKPolicy : public Policy {
 public:
  explicit WaitKPolicy(int k);
  Action decide(const PolicyState& state) const override;
  std::string name() const override { return "wait_k"; }
  int k() const { return k_; }
  // Source tokens visible when the t-th target token is produced.
  int g_of(int t, int source_len) const;

 private:
  int k_;
};

// Adaptive proxy: write while the model's top next-token probability (probed
// on the committed prefix) clears rho, guarded by k_min forced reads and a
// cap on consecutive writes.
class ThresholdPolicy : public Policy {
 public:
  ThresholdPolicy(double rho, int k_min = 1, int cap = 10);
  Action decide(const PolicyState& state) const override;
  std::string name() const override { return "threshold"; }
  double rho() const { return rho_; }
  int k_min() const { return k_min_; }
  int cap() const { return cap_; }

 private:
  double rho_;
  int k_min_;
  int cap_;
};

}  // namespace simulmt
