#include "simulmt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>

namespace simulmt {

LastRevisionProfile last_revision(const CommitTrace& trace) {
  LastRevisionProfile profile;
  const int n = trace.source_len;
  const int len = static_cast<int>(trace.final_output.size());
  profile.ratio = n > 0 ? static_cast<double>(len) / static_cast<double>(n) : 0.0;
  profile.lr.resize(static_cast<std::size_t>(len), 0);
  profile.lr_bar.resize(static_cast<std::size_t>(len), 0);

  static const Sentence empty;
  for (int t = 1; t <= len; ++t) {
    int last = 0;
    for (int s = 1; s <= n; ++s) {
      const Sentence& prev = s > 1 ? trace.snapshots[static_cast<std::size_t>(s - 2)].displayed : empty;
      const Sentence& cur = trace.snapshots[static_cast<std::size_t>(s - 1)].displayed;
      const bool in_prev = t <= static_cast<int>(prev.size());
      const bool in_cur = t <= static_cast<int>(cur.size());
      const bool changed =
          (!in_prev && in_cur) ||
          (in_prev && in_cur &&
           prev[static_cast<std::size_t>(t - 1)] != cur[static_cast<std::size_t>(t - 1)]);
      if (changed) last = s;
    }
    profile.lr[static_cast<std::size_t>(t - 1)] = last;
  }

  int running = 0;
  for (int t = 0; t < len; ++t) {
    running = std::max(running, profile.lr[static_cast<std::size_t>(t)]);
    profile.lr_bar[static_cast<std::size_t>(t)] = running;
  }

  profile.tau = len;
  for (int t = 0; t < len; ++t) {
    if (profile.lr_bar[static_cast<std::size_t>(t)] == n) {
      profile.tau = t + 1;
      break;
    }
  }
  return profile;
}

double ral(const CommitTrace& trace) {
  if (trace.final_output.empty()) return 0.0;
  LastRevisionProfile p = last_revision(trace);
  double sum = 0.0;
  for (int t = 1; t <= p.tau; ++t)
    sum += static_cast<double>(p.lr_bar[static_cast<std::size_t>(t - 1)]) -
           static_cast<double>(t - 1) / p.ratio;
  return sum / static_cast<double>(p.tau);
}

double al(const CommitTrace& trace) {
  if (trace.final_output.empty()) return 0.0;
  const int n = trace.source_len;
  const int len = static_cast<int>(trace.final_output.size());
  const double ratio = static_cast<double>(len) / static_cast<double>(n);

  std::vector<int> first(static_cast<std::size_t>(len), n);
  for (int t = 1; t <= len; ++t) {
    for (int s = 1; s <= n; ++s) {
      if (t <= static_cast<int>(
                   trace.snapshots[static_cast<std::size_t>(s - 1)].displayed.size())) {
        first[static_cast<std::size_t>(t - 1)] = s;
        break;
      }
    }
  }

  int tau = len;
  for (int t = 0; t < len; ++t) {
    if (first[static_cast<std::size_t>(t)] == n) {
      tau = t + 1;
      break;
    }
  }
  double sum = 0.0;
  for (int t = 1; t <= tau; ++t)
    sum += static_cast<double>(first[static_cast<std::size_t>(t - 1)]) -
           static_cast<double>(t - 1) / ratio;
  return sum / static_cast<double>(tau);
}

int dist_padded(const Sentence& a, const Sentence& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Token& other = i < b.size() ? b[i] : kPad;
    if (a[i] != other) ++d;
  }
  return d;
}

double revision_rate(const CommitTrace& trace) {
  long long num = 0;
  long long den = 0;
  for (std::size_t s = 0; s < trace.snapshots.size(); ++s) {
    den += static_cast<long long>(trace.snapshots[s].displayed.size());
    if (s + 1 < trace.snapshots.size())
      num += dist_padded(trace.snapshots[s].displayed, trace.snapshots[s + 1].displayed);
  }
  if (den == 0) return 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

namespace {

constexpr int kMaxOrder = 4;

using NgramCounts = std::map<std::vector<Token>, int>;

NgramCounts count_ngrams(const Sentence& tokens, int order) {
  NgramCounts counts;
  if (static_cast<int>(tokens.size()) < order) return counts;
  for (std::size_t i = 0; i + static_cast<std::size_t>(order) <= tokens.size(); ++i) {
    std::vector<Token> gram(tokens.begin() + static_cast<long>(i),
                            tokens.begin() + static_cast<long>(i) + order);
    ++counts[gram];
  }
  return counts;
}

}  // namespace

double bleu(const std::vector<Sentence>& hypotheses,
            const std::vector<std::vector<Sentence>>& reference_sets) {
  if (hypotheses.empty()) throw std::invalid_argument("empty hypothesis corpus");
  if (hypotheses.size() != reference_sets.size())
    throw std::invalid_argument("hypothesis/reference count mismatch");

  long long matched[kMaxOrder] = {0, 0, 0, 0};
  long long total[kMaxOrder] = {0, 0, 0, 0};
  long long hyp_len = 0;
  long long ref_len = 0;

  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const Sentence& hyp = hypotheses[i];
    const auto& refs = reference_sets[i];
    if (refs.empty()) throw std::invalid_argument("sentence without references");

    hyp_len += static_cast<long long>(hyp.size());
    // Closest reference length; ties go to the shorter one.
    long long best_ref = static_cast<long long>(refs.front().size());
    for (const Sentence& r : refs) {
      long long rl = static_cast<long long>(r.size());
      long long cur = std::llabs(rl - static_cast<long long>(hyp.size()));
      long long best = std::llabs(best_ref - static_cast<long long>(hyp.size()));
      if (cur < best || (cur == best && rl < best_ref)) best_ref = rl;
    }
    ref_len += best_ref;

    for (int order = 1; order <= kMaxOrder; ++order) {
      NgramCounts hyp_counts = count_ngrams(hyp, order);
      NgramCounts max_ref;
      for (const Sentence& r : refs) {
        for (const auto& [gram, c] : count_ngrams(r, order))
          max_ref[gram] = std::max(max_ref[gram], c);
      }
      for (const auto& [gram, c] : hyp_counts) {
        total[order - 1] += c;
        auto it = max_ref.find(gram);
        if (it != max_ref.end()) matched[order - 1] += std::min(c, it->second);
      }
    }
  }

  if (hyp_len == 0 || total[0] == 0 || matched[0] == 0) return 0.0;

  double log_precision = 0.0;
  for (int order = 1; order <= kMaxOrder; ++order) {
    double m = static_cast<double>(matched[order - 1]);
    double t = static_cast<double>(total[order - 1]);
    if (order >= 2) {  // add-one smoothing
      m += 1.0;
      t += 1.0;
    }
    log_precision += std::log(m / t) / kMaxOrder;
  }
  double brevity = hyp_len < ref_len
                       ? 1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len)
                       : 0.0;
  return 100.0 * std::exp(log_precision + brevity);
}

MetricsReport compute_report(const std::vector<CommitTrace>& traces,
                             const std::vector<std::vector<Sentence>>& reference_sets) {
  MetricsReport report;
  if (traces.empty()) return report;
  if (!reference_sets.empty() && reference_sets.size() != traces.size())
    throw std::invalid_argument("trace/reference count mismatch");

  double ral_sum = 0.0;
  double al_sum = 0.0;
  long long revisions = 0;
  long long displayed = 0;
  std::vector<Sentence> finals;
  finals.reserve(traces.size());

  for (const CommitTrace& trace : traces) {
    SentenceMetrics sm;
    sm.ral = ral(trace);
    sm.al = al(trace);
    for (std::size_t s = 0; s < trace.snapshots.size(); ++s) {
      sm.displayed_total += static_cast<long long>(trace.snapshots[s].displayed.size());
      if (s + 1 < trace.snapshots.size())
        sm.revisions +=
            dist_padded(trace.snapshots[s].displayed, trace.snapshots[s + 1].displayed);
    }
    ral_sum += sm.ral;
    al_sum += sm.al;
    revisions += sm.revisions;
    displayed += sm.displayed_total;
    finals.push_back(trace.final_output);
    report.per_sentence.push_back(sm);
  }

  report.ral = ral_sum / static_cast<double>(traces.size());
  report.al = al_sum / static_cast<double>(traces.size());
  report.revision_rate =
      displayed == 0 ? 0.0 : static_cast<double>(revisions) / static_cast<double>(displayed);
  if (!reference_sets.empty()) report.bleu = bleu(finals, reference_sets);
  return report;
}

}  // namespace simulmt
