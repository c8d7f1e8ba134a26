#include "simulmt/decoder.hpp"

#include <algorithm>
#include <cmath>

namespace simulmt {

namespace {

// Stands in for log(0) so zero-probability extensions stay totally ordered
// instead of producing NaNs downstream.
constexpr double kLogFloor = -1e18;

double log_or_floor(double p) { return p > 0.0 ? std::log(p) : kLogFloor; }

bool better(const Hypothesis& a, const Hypothesis& b) {
  if (a.logprob != b.logprob) return a.logprob > b.logprob;
  return a.tokens < b.tokens;
}

void rank_and_prune(std::vector<Hypothesis>& items, int b) {
  std::sort(items.begin(), items.end(), better);
  if (static_cast<int>(items.size()) > b) items.resize(static_cast<std::size_t>(b));
}

Sentence model_view(const Sentence& source, int revealed, bool complete) {
  Sentence view(source.begin(), source.begin() + revealed);
  if (complete) view.push_back(kEos);
  return view;
}

struct TailResult {
  Sentence tokens;  // EOS stripped
};

// Beam search until the best hypothesis ends, starting from `prefix`.
// new-token budget: at most max_new content tokens before EOS must appear.
TailResult run_to_eos(const Sentence& prefix, const IncrementalModel& model,
                      const Sentence& source_view, int b, int max_new) {
  Beam beam;
  beam.items.push_back({prefix, 0.0, false});
  for (int step = 0; step <= max_new; ++step) {
    if (beam.items.front().finished) break;
    beam = beam_step(beam, b, model, source_view);
  }
  const Hypothesis& top = beam.items.front();
  if (!top.finished)
    throw DecodeError("no EOS within length cap of " + std::to_string(max_new) +
                      " new tokens");
  TailResult out;
  out.tokens.assign(top.tokens.begin() + static_cast<long>(prefix.size()),
                    top.tokens.end());
  if (!out.tokens.empty() && is_eos(out.tokens.back())) out.tokens.pop_back();
  return out;
}

}  // namespace

Beam beam_step(const Beam& beam, int b, const IncrementalModel& model,
               const Sentence& source_prefix, bool mask_eos) {
  if (b < 1) throw DecodeError("beam width must be >= 1");
  std::vector<Hypothesis> expanded;
  for (const Hypothesis& h : beam.items) {
    if (h.finished) {
      expanded.push_back(h);
      continue;
    }
    Distribution dist = model.next_distribution(source_prefix, h.tokens);
    for (const auto& [tok, p] : dist.entries()) {
      if (mask_eos && is_eos(tok)) continue;
      Hypothesis next;
      next.tokens = h.tokens;
      next.tokens.push_back(tok);
      next.logprob = h.logprob + log_or_floor(p);
      next.finished = is_eos(tok);
      expanded.push_back(std::move(next));
    }
  }
  if (expanded.empty())
    throw DecodeError("beam exhausted: no viable extension");
  rank_and_prune(expanded, b);
  return Beam{std::move(expanded)};
}

Beam beam_advance(const Beam& beam, int i, int b, const IncrementalModel& model,
                  const Sentence& source_prefix, bool mask_eos) {
  if (i < 0) throw DecodeError("negative advance count");
  Beam current = beam;
  for (int step = 0; step < i; ++step)
    current = beam_step(current, b, model, source_prefix, mask_eos);
  return current;
}

CommitResult commit_step(const DecoderState& state, const IncrementalModel& model,
                         const Sentence& source_prefix, int n, int w, int b,
                         const DecodeOptions&) {
  if (n < 1) throw DecodeError("commit batch must hold at least one token");
  if (w < 0) throw DecodeError("negative window");

  Beam beam;
  beam.items.push_back({state.committed, 0.0, false});
  // Irreversible slots first, with EOS off the table; then the revisable tail.
  beam = beam_advance(beam, n, b, model, source_prefix, /*mask_eos=*/true);
  beam = beam_advance(beam, w, b, model, source_prefix, /*mask_eos=*/false);

  const Hypothesis& top = beam.items.front();
  Sentence fresh(top.tokens.begin() + static_cast<long>(state.committed.size()),
                 top.tokens.end());

  CommitResult result;
  result.newly_committed.assign(fresh.begin(), fresh.begin() + n);
  for (int i = n; i < static_cast<int>(fresh.size()) && i < n + w; ++i) {
    if (is_eos(fresh[static_cast<std::size_t>(i)])) break;
    result.new_revisable.push_back(fresh[static_cast<std::size_t>(i)]);
  }
  result.state = state;
  result.state.committed.insert(result.state.committed.end(),
                                result.newly_committed.begin(),
                                result.newly_committed.end());
  result.state.revisable = result.new_revisable;
  return result;
}

CommitTrace decode_simultaneous(const IncrementalModel& model, const Policy& policy,
                                const Sentence& source, int window, int beam_size,
                                const DecodeOptions& options) {
  if (source.empty()) throw DecodeError("empty source");
  if (window < 0) throw DecodeError("negative window");
  if (beam_size < 1) throw DecodeError("beam width must be >= 1");
  for (const Token& t : source)
    if (is_eos(t) || is_pad(t)) throw DecodeError("sentinel token in source");

  const int source_len = static_cast<int>(source.size());
  const int cap = options.max_len_ratio * source_len;

  CommitTrace trace;
  trace.source_len = source_len;
  DecoderState state;

  for (int s = 1; s <= source_len; ++s) {
    state.source_read = s;
    const Sentence view = model_view(source, s, s == source_len);
    try {
      if (s < source_len) {
        // Length of the maximal consecutive write run, probed greedily on the
        // committed prefix; the actual tokens come from one beam search.
        int run = 0;
        Sentence probe = state.committed;
        while (static_cast<int>(state.committed.size()) + run < cap) {
          PolicyState ps;
          ps.source_read = s;
          ps.committed = static_cast<int>(state.committed.size()) + run;
          ps.source_len = source_len;
          ps.run_length = run;
          ps.model = &model;
          ps.source_prefix = &view;
          ps.committed_prefix = &probe;
          if (policy.decide(ps) != Action::Write) break;
          Token next = model.next_distribution(view, probe).argmax();
          if (is_eos(next)) break;  // nothing committable yet
          probe.push_back(next);
          ++run;
        }
        if (run > 0) {
          CommitResult res =
              commit_step(state, model, view, run, window, beam_size, options);
          state = res.state;
        }
      } else {
        // Whole source visible: finish the target and make it irreversible.
        int budget = cap - static_cast<int>(state.committed.size());
        if (budget < 0) budget = 0;
        TailResult tail = run_to_eos(state.committed, model, view, beam_size, budget);
        state.committed.insert(state.committed.end(), tail.tokens.begin(),
                               tail.tokens.end());
        state.revisable.clear();
      }
    } catch (const std::exception& e) {
      throw DecodeError("decode failed at s=" + std::to_string(s) +
                        ", t=" + std::to_string(state.committed.size()) + ": " +
                        e.what());
    }

    Snapshot snap;
    snap.source_step = s;
    snap.displayed = state.committed;
    snap.displayed.insert(snap.displayed.end(), state.revisable.begin(),
                          state.revisable.end());
    snap.committed_len = static_cast<int>(state.committed.size());
    trace.snapshots.push_back(std::move(snap));
  }

  trace.final_output = trace.snapshots.back().displayed;
  return trace;
}

Sentence full_sentence_decode(const IncrementalModel& model, const Sentence& source,
                              int beam_size, const DecodeOptions& options,
                              bool source_complete) {
  if (source.empty()) throw DecodeError("empty source");
  Sentence view = source;
  if (source_complete && !ends_with_eos(view)) view.push_back(kEos);
  const int cap = options.max_len_ratio * static_cast<int>(content_size(view));
  TailResult out = run_to_eos({}, model, view, beam_size, cap);
  return out.tokens;
}

CommitTrace decode_retranslation(const IncrementalModel& model, const Sentence& source,
                                 int beam_size, const DecodeOptions& options) {
  if (source.empty()) throw DecodeError("empty source");
  const int source_len = static_cast<int>(source.size());
  CommitTrace trace;
  trace.source_len = source_len;
  for (int s = 1; s <= source_len; ++s) {
    Sentence prefix(source.begin(), source.begin() + s);
    Sentence out;
    try {
      out = full_sentence_decode(model, prefix, beam_size, options,
                                 /*source_complete=*/s == source_len);
    } catch (const std::exception& e) {
      throw DecodeError("re-translation failed at s=" + std::to_string(s) + ": " +
                        e.what());
    }
    Snapshot snap;
    snap.source_step = s;
    snap.displayed = std::move(out);
    snap.committed_len =
        s == source_len ? static_cast<int>(snap.displayed.size()) : 0;
    trace.snapshots.push_back(std::move(snap));
  }
  trace.final_output = trace.snapshots.back().displayed;
  return trace;
}

CommitTrace full_sentence_trace(const IncrementalModel& model, const Sentence& source,
                                int beam_size, const DecodeOptions& options) {
  if (source.empty()) throw DecodeError("empty source");
  const int source_len = static_cast<int>(source.size());
  CommitTrace trace;
  trace.source_len = source_len;
  for (int s = 1; s < source_len; ++s)
    trace.snapshots.push_back({s, {}, 0});
  Sentence out = full_sentence_decode(model, source, beam_size, options);
  trace.snapshots.push_back(
      {source_len, out, static_cast<int>(out.size())});
  trace.final_output = std::move(out);
  return trace;
}

}  // namespace simulmt
