#pragma once

#include <string>
#include <vector>

#include "simulmt/model.hpp"
#include "simulmt/policy.hpp"
#include "simulmt/trace.hpp"
#include "simulmt/types.hpp"

namespace simulmt {

struct DecodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A scored target prefix. tokens holds the full target from position 1;
// finished hypotheses (EOS generated) are carried, never extended.
struct Hypothesis {
  Sentence tokens;
  double logprob = 0.0;
  bool finished = false;
};

// Width-bounded list, best first; ties broken by lexicographic token order.
struct Beam {
  std::vector<Hypothesis> items;
};

struct DecodeOptions {
  int max_len_ratio = 3;  // target length cap as a multiple of |source|
};

// One expansion step: every unfinished hypothesis is extended by each
// vocabulary token and EOS, finished ones are carried over, and the top b
// survive. mask_eos excludes EOS from the candidates (used while filling
// irreversible slots before the source has ended).
Beam beam_step(const Beam& beam, int b, const IncrementalModel& model,
               const Sentence& source_prefix, bool mask_eos = false);

// i-fold composition of beam_step; i = 0 is the identity.
Beam beam_advance(const Beam& beam, int i, int b, const IncrementalModel& model,
                  const Sentence& source_prefix, bool mask_eos = false);

// Mutable state of one streaming decode. displayed output is committed
// followed by revisable; committed never changes once written.
struct DecoderState {
  Sentence committed;
  Sentence revisable;
  int source_read = 0;
};

struct CommitResult {
  DecoderState state;
  Sentence newly_committed;  // exactly n tokens
  Sentence new_revisable;    // at most w tokens, replaces the previous window
};

// Runs an (n+w)-step beam search from the committed prefix, makes the first
// n new tokens of the best hypothesis irreversible and replaces the window
// with the remainder (truncated at EOS). EOS may not occupy a committed slot
// before the source has ended, so the first n steps exclude it.
CommitResult commit_step(const DecoderState& state, const IncrementalModel& model,
                         const Sentence& source_prefix, int n, int w, int b,
                         const DecodeOptions& options = {});

// Drives the read/write loop for one sentence: each read reveals a source
// token; each maximal run of writes triggers one commit step; once the whole
// source is visible the target is decoded to EOS and fully committed.
CommitTrace decode_simultaneous(const IncrementalModel& model, const Policy& policy,
                                const Sentence& source, int window, int beam_size,
                                const DecodeOptions& options = {});

// Baseline: re-decode the whole target from scratch after every new source
// token; nothing is committed until the end.
CommitTrace decode_retranslation(const IncrementalModel& model, const Sentence& source,
                                 int beam_size, const DecodeOptions& options = {});

// Whole-sentence beam decode, EOS stripped. source_complete appends the EOS
// marker to the model's view of the source.
Sentence full_sentence_decode(const IncrementalModel& model, const Sentence& source,
                              int beam_size, const DecodeOptions& options = {},
                              bool source_complete = true);

// Degenerate trace for the full-sentence system: output appears only once
// the whole source has been read.
CommitTrace full_sentence_trace(const IncrementalModel& model, const Sentence& source,
                                int beam_size, const DecodeOptions& options = {});

}  // namespace simulmt
