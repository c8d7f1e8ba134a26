#include "simulmt/trace.hpp"

#include <json.hpp>

#include <sstream>

namespace simulmt {

using ordered_json = nlohmann::ordered_json;

std::optional<std::string> trace_validate(const CommitTrace& trace,
                                          std::optional<int> window) {
  if (trace.source_len < 0) return "negative source_len";
  if (static_cast<int>(trace.snapshots.size()) != trace.source_len)
    return "snapshot count " + std::to_string(trace.snapshots.size()) +
           " != source_len " + std::to_string(trace.source_len);

  for (int i = 0; i < trace.source_len; ++i) {
    const Snapshot& snap = trace.snapshots[i];
    if (snap.source_step != i + 1)
      return "snapshot source_steps not 1.." + std::to_string(trace.source_len);
    if (snap.committed_len < 0) return "negative committed_len";
    if (snap.committed_len > static_cast<int>(snap.displayed.size()))
      return "committed_len exceeds displayed length at s=" + std::to_string(i + 1);
    if (window && static_cast<int>(snap.displayed.size()) - snap.committed_len > *window)
      return "window bound exceeded at s=" + std::to_string(i + 1);
    for (const Token& t : snap.displayed)
      if (is_eos(t) || is_pad(t))
        return "sentinel token displayed at s=" + std::to_string(i + 1);
  }

  for (int i = 1; i < trace.source_len; ++i) {
    const Snapshot& prev = trace.snapshots[i - 1];
    const Snapshot& cur = trace.snapshots[i];
    if (cur.committed_len < prev.committed_len)
      return "committed_len non-monotone at s=" + std::to_string(i + 1);
    for (int p = 0; p < prev.committed_len; ++p) {
      if (p >= static_cast<int>(cur.displayed.size()) ||
          cur.displayed[p] != prev.displayed[p])
        return "committed token changed at s=" + std::to_string(i + 1) +
               " position " + std::to_string(p + 1);
    }
  }

  if (trace.source_len > 0 && trace.snapshots.back().displayed != trace.final_output)
    return "final_output differs from last snapshot";
  return std::nullopt;
}

std::string trace_to_jsonl(const CommitTrace& trace) {
  std::ostringstream out;
  trace_to_stream(trace, out);
  return out.str();
}

void trace_to_stream(const CommitTrace& trace, std::ostream& out) {
  ordered_json header;
  header["source_len"] = trace.source_len;
  out << header.dump() << '\n';
  for (const Snapshot& snap : trace.snapshots) {
    ordered_json line;
    line["s"] = snap.source_step;
    line["committed"] = snap.committed_len;
    line["displayed"] = snap.displayed;
    out << line.dump() << '\n';
  }
}

namespace {

ordered_json parse_line(const std::string& line, int line_no) {
  ordered_json j = ordered_json::parse(line, nullptr, false);
  if (j.is_discarded()) throw TraceParseError(line_no, "malformed JSON");
  if (!j.is_object()) throw TraceParseError(line_no, "expected a JSON object");
  return j;
}

}  // namespace

CommitTrace trace_from_stream(std::istream& in) {
  CommitTrace trace;
  std::string line;
  int line_no = 0;

  while (std::getline(in, line) && line.empty()) ++line_no;
  ++line_no;
  if (in.fail() && line.empty()) throw TraceParseError(line_no, "missing header");
  ordered_json header = parse_line(line, line_no);
  if (!header.contains("source_len") || !header["source_len"].is_number_integer())
    throw TraceParseError(line_no, "header missing integer source_len");
  trace.source_len = header["source_len"].get<int>();

  while (static_cast<int>(trace.snapshots.size()) < trace.source_len) {
    if (!std::getline(in, line))
      throw TraceParseError(line_no + 1, "unexpected end of input");
    ++line_no;
    if (line.empty()) continue;
    ordered_json j = parse_line(line, line_no);
    Snapshot snap;
    if (!j.contains("s") || !j["s"].is_number_integer())
      throw TraceParseError(line_no, "snapshot missing integer s");
    if (!j.contains("committed") || !j["committed"].is_number_integer())
      throw TraceParseError(line_no, "snapshot missing integer committed");
    if (!j.contains("displayed") || !j["displayed"].is_array())
      throw TraceParseError(line_no, "snapshot missing displayed array");
    snap.source_step = j["s"].get<int>();
    snap.committed_len = j["committed"].get<int>();
    for (const auto& tok : j["displayed"]) {
      if (!tok.is_string()) throw TraceParseError(line_no, "displayed holds a non-string");
      snap.displayed.push_back(tok.get<std::string>());
    }
    trace.snapshots.push_back(std::move(snap));
  }

  if (!trace.snapshots.empty()) trace.final_output = trace.snapshots.back().displayed;
  return trace;
}

CommitTrace trace_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  return trace_from_stream(in);
}

}  // namespace simulmt
