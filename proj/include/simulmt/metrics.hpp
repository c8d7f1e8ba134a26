#pragma once

#include <vector>

#include "simulmt/trace.hpp"
#include "simulmt/types.hpp"

namespace simulmt {

// Per final-output position: the last source step at which it changed, the
// running maximum of that (what the audience effectively waited for), the
// averaging cut-off and the length ratio.
struct LastRevisionProfile {
  std::vector<int> lr;
  std::vector<int> lr_bar;
  int tau = 0;
  double ratio = 0.0;  // |final_output| / |source|
};

LastRevisionProfile last_revision(const CommitTrace& trace);

// Revision-aware average lagging. 0 for an empty final output.
double ral(const CommitTrace& trace);

// Classical average lagging from first-appearance steps.
double al(const CommitTrace& trace);

// Positions of `a` that disagree with `b` truncated/padded to |a|.
int dist_padded(const Sentence& a, const Sentence& b);

// Total padded Hamming change between consecutive snapshots over total
// displayed length; 0 when every snapshot is empty.
double revision_rate(const CommitTrace& trace);

// Corpus BLEU-4: clipped n-gram precisions with add-one smoothing for
// n >= 2, times brevity penalty, scaled to [0,100].
double bleu(const std::vector<Sentence>& hypotheses,
            const std::vector<std::vector<Sentence>>& reference_sets);

struct SentenceMetrics {
  double ral = 0.0;
  double al = 0.0;
  long long revisions = 0;      // pooled numerator
  long long displayed_total = 0;  // pooled denominator
};

struct MetricsReport {
  double ral = 0.0;            // mean over sentences
  double al = 0.0;             // mean over sentences
  double revision_rate = 0.0;  // pooled
  double bleu = 0.0;           // corpus level
  std::vector<SentenceMetrics> per_sentence;
};

MetricsReport compute_report(const std::vector<CommitTrace>& traces,
                             const std::vector<std::vector<Sentence>>& reference_sets);

}  // namespace simulmt
