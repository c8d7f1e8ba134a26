#include "simulmt/policy.hpp"

#include <algorithm>
#include <stdexcept>

namespace simulmt {

WaitKPolicy::WaitKPolicy(int k) : k_(k) {
  if (k < 1) throw std::invalid_argument("wait-k needs k >= 1");
}

int WaitKPolicy::g_of(int t, int source_len) const {
  return std::min(k_ + t - 1, source_len);
}

Action WaitKPolicy::decide(const PolicyState& state) const {
  if (state.source_read >= state.source_len) return Action::Write;
  // Write once the next target position's schedule is satisfied.
  return state.source_read >= std::min(k_ + state.committed, state.source_len)
             ? Action::Write
             : Action::Read;
}

ThresholdPolicy::ThresholdPolicy(double rho, int k_min, int cap)
    : rho_(rho), k_min_(k_min), cap_(cap) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0,1)");
  if (k_min < 1) throw std::invalid_argument("k_min must be >= 1");
  if (cap < 1) throw std::invalid_argument("cap must be >= 1");
}

Action ThresholdPolicy::decide(const PolicyState& state) const {
  if (state.source_read >= state.source_len) return Action::Write;
  if (state.source_read < k_min_) return Action::Read;
  if (state.run_length >= cap_) return Action::Read;
  Distribution dist =
      state.model->next_distribution(*state.source_prefix, *state.committed_prefix);
  double top = 0.0;
  for (const auto& [tok, p] : dist.entries()) top = std::max(top, p);
  return top >= rho_ ? Action::Write : Action::Read;
}

}  // namespace simulmt
