#include <doctest.h>

#include "simulmt/rng.hpp"
#include "simulmt/trace.hpp"

using namespace simulmt;

namespace {

CommitTrace make_trace(std::vector<std::pair<Sentence, int>> steps) {
  CommitTrace trace;
  trace.source_len = static_cast<int>(steps.size());
  int s = 0;
  for (auto& [displayed, committed] : steps)
    trace.snapshots.push_back({++s, displayed, committed});
  if (!trace.snapshots.empty()) trace.final_output = trace.snapshots.back().displayed;
  return trace;
}

CommitTrace random_valid_trace(Rng& rng) {
  static const std::vector<Token> words = {"a", "b", "c", "összetett", "x1"};
  CommitTrace trace;
  trace.source_len = rng.range(1, 6);
  Sentence committed;
  int window = rng.range(0, 3);
  for (int s = 1; s <= trace.source_len; ++s) {
    int grow = rng.range(0, 2);
    for (int i = 0; i < grow; ++i) committed.push_back(words[rng.below(words.size())]);
    Sentence displayed = committed;
    int extra = rng.range(0, window);
    for (int i = 0; i < extra; ++i) displayed.push_back(words[rng.below(words.size())]);
    trace.snapshots.push_back({s, displayed, static_cast<int>(committed.size())});
  }
  trace.final_output = trace.snapshots.back().displayed;
  return trace;
}

}  // namespace

TEST_CASE("monotone append satisfies all invariants") {
  auto trace = make_trace({{{"A"}, 1}, {{"A", "B"}, 2}});
  CHECK_FALSE(trace_validate(trace).has_value());
}

TEST_CASE("committed token change is reported first") {
  auto trace = make_trace({{{"A"}, 1}, {{"B", "C"}, 2}});
  auto violation = trace_validate(trace);
  REQUIRE(violation.has_value());
  CHECK(violation->find("committed token changed") != std::string::npos);
}

TEST_CASE("committed_len may not decrease") {
  auto trace = make_trace({{{"A", "B"}, 2}, {{"A", "B"}, 1}});
  auto violation = trace_validate(trace);
  REQUIRE(violation.has_value());
  CHECK(violation->find("non-monotone") != std::string::npos);
}

TEST_CASE("window bound is checked when given") {
  auto trace = make_trace({{{"A", "B", "C"}, 1}});
  CHECK_FALSE(trace_validate(trace).has_value());
  auto violation = trace_validate(trace, 1);
  REQUIRE(violation.has_value());
  CHECK(violation->find("window") != std::string::npos);
}

TEST_CASE("snapshot steps must cover 1..source_len") {
  auto trace = make_trace({{{"A"}, 1}});
  trace.snapshots[0].source_step = 2;
  CHECK(trace_validate(trace).has_value());
  trace.source_len = 3;
  trace.snapshots[0].source_step = 1;
  CHECK(trace_validate(trace).has_value());
}

TEST_CASE("final output must match the last snapshot") {
  auto trace = make_trace({{{"A"}, 1}});
  trace.final_output = {"B"};
  auto violation = trace_validate(trace);
  REQUIRE(violation.has_value());
  CHECK(violation->find("final_output") != std::string::npos);
}

TEST_CASE("sentinels never appear in displayed output") {
  auto trace = make_trace({{{"A", kEos}, 1}});
  CHECK(trace_validate(trace).has_value());
}

TEST_CASE("empty display serializes as an empty array") {
  auto trace = make_trace({{{}, 0}, {{"A"}, 1}});
  std::string text = trace_to_jsonl(trace);
  CHECK(text.find("\"displayed\":[]") != std::string::npos);
}

TEST_CASE("round trip is identity and byte stable") {
  auto trace = make_trace({{{"A"}, 1}, {{"A", "B"}, 1}, {{"A", "B", "C"}, 3}});
  std::string once = trace_to_jsonl(trace);
  CommitTrace back = trace_from_jsonl(once);
  CHECK(back.source_len == trace.source_len);
  CHECK(back.final_output == trace.final_output);
  REQUIRE(back.snapshots.size() == trace.snapshots.size());
  for (std::size_t i = 0; i < back.snapshots.size(); ++i) {
    CHECK(back.snapshots[i].displayed == trace.snapshots[i].displayed);
    CHECK(back.snapshots[i].committed_len == trace.snapshots[i].committed_len);
  }
  CHECK(trace_to_jsonl(back) == once);
}

TEST_CASE("multi-byte tokens survive the round trip") {
  auto trace = make_trace({{{"héllo", "世界"}, 2}});
  CHECK(trace_from_jsonl(trace_to_jsonl(trace)).final_output == trace.final_output);
}

TEST_CASE("parse errors carry line numbers") {
  CHECK_THROWS_AS(trace_from_jsonl("{\"source_len\":1}\nnot json\n"), TraceParseError);
  try {
    trace_from_jsonl("{\"source_len\":2}\n{\"s\":1,\"committed\":0,\"displayed\":[]}\n");
    CHECK(false);
  } catch (const TraceParseError& e) {
    CHECK(e.line == 3);
  }
  try {
    trace_from_jsonl("{\"source_len\":1}\n{\"s\":1,\"displayed\":[]}\n");
    CHECK(false);
  } catch (const TraceParseError& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("committed") != std::string::npos);
  }
}

TEST_CASE("serialization round trip holds for random traces") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    CommitTrace trace = random_valid_trace(rng);
    REQUIRE_FALSE(trace_validate(trace).has_value());
    std::string text = trace_to_jsonl(trace);
    CommitTrace back = trace_from_jsonl(text);
    CHECK(trace_to_jsonl(back) == text);
    CHECK(back.final_output == trace.final_output);
  }
}
