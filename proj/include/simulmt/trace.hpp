#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "simulmt/types.hpp"

namespace simulmt {

// One per revealed source token: everything the audience sees after the
// engine finished reacting to that token. The first committed_len tokens of
// `displayed` are irreversible; the rest may still change.
struct Snapshot {
  int source_step = 0;      // s, 1-based
  Sentence displayed;       // committed prefix followed by revisable suffix
  int committed_len = 0;
};

struct CommitTrace {
  int source_len = 0;
  std::vector<Snapshot> snapshots;  // exactly one per s = 1..source_len
  Sentence final_output;            // equals snapshots.back().displayed
};

// Returns the first violated invariant as a message, or nullopt if the trace
// is well-formed. `window` additionally bounds the revisable suffix length.
std::optional<std::string> trace_validate(const CommitTrace& trace,
                                          std::optional<int> window = std::nullopt);

struct TraceParseError : std::runtime_error {
  int line = 0;
  TraceParseError(int line_no, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + what),
        line(line_no) {}
};

// JSONL layout: a {"source_len":N} header line, then one
// {"s":..,"committed":..,"displayed":[..]} object per snapshot.
std::string trace_to_jsonl(const CommitTrace& trace);
CommitTrace trace_from_jsonl(const std::string& text);
void trace_to_stream(const CommitTrace& trace, std::ostream& out);
CommitTrace trace_from_stream(std::istream& in);

}  // namespace simulmt
