#include "simulmt/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "simulmt/rng.hpp"
#include "simulmt/subprocess_model.hpp"

namespace simulmt {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<Sentence> load_corpus(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw HarnessError("cannot open corpus file: " + file.string());
  std::vector<Sentence> lines;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    Sentence tokens = split_tokens(line);
    if (tokens.empty())
      throw HarnessError(file.string() + ":" + std::to_string(line_no) + ": empty sentence");
    for (const Token& t : tokens) {
      try {
        check_token(t);
      } catch (const TokenError& e) {
        throw HarnessError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    lines.push_back(std::move(tokens));
  }
  return lines;
}

void write_corpus(const fs::path& file, const std::vector<Sentence>& lines) {
  std::ofstream out(file);
  if (!out) throw HarnessError("cannot write corpus file: " + file.string());
  for (const Sentence& s : lines) out << join_tokens(s) << '\n';
}

ModelSpec model_spec_from_json_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw HarnessError("cannot open model file: " + file.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw HarnessError("malformed model file: " + file.string());

  ModelSpec spec;
  spec.type = j.value("type", std::string("transducer"));
  if (j.contains("table")) {
    for (const auto& [src, tgt] : j["table"].items())
      spec.table[src] = tgt.get<std::string>();
  }
  spec.lookahead = j.value("lookahead", 0);
  spec.default_token = j.value("default", std::string("<unk>"));
  spec.sharpness = j.value("sharpness", 1.0);
  if (j.contains("ambiguous"))
    spec.ambiguous = j["ambiguous"].get<std::vector<std::string>>();
  if (j.contains("command"))
    spec.command = j["command"].get<std::vector<std::string>>();
  spec.top_k = j.value("top_k", 16);
  spec.timeout_seconds = j.value("timeout_seconds", 10.0);
  return spec;
}

void model_spec_to_json_file(const ModelSpec& spec, const fs::path& file) {
  nlohmann::ordered_json j;
  j["type"] = spec.type;
  if (!spec.table.empty()) {
    nlohmann::ordered_json table;
    for (const auto& [src, tgt] : spec.table) table[src] = tgt;
    j["table"] = table;
  }
  j["lookahead"] = spec.lookahead;
  j["default"] = spec.default_token;
  j["sharpness"] = spec.sharpness;
  if (!spec.ambiguous.empty()) j["ambiguous"] = spec.ambiguous;
  if (!spec.command.empty()) {
    j["command"] = spec.command;
    j["top_k"] = spec.top_k;
    j["timeout_seconds"] = spec.timeout_seconds;
  }
  std::ofstream out(file);
  if (!out) throw HarnessError("cannot write model file: " + file.string());
  out << j.dump(2) << '\n';
}

std::shared_ptr<IncrementalModel> build_model(const ModelSpec& spec,
                                              const std::vector<Sentence>& sources) {
  if (spec.type == "echo") {
    std::set<Token> alphabet;
    for (const Sentence& s : sources) alphabet.insert(s.begin(), s.end());
    return make_echo_model({alphabet.begin(), alphabet.end()});
  }
  if (spec.type == "transducer") {
    return std::make_shared<TransducerModel>(
        spec.table, spec.lookahead, spec.default_token, spec.sharpness,
        std::set<Token>(spec.ambiguous.begin(), spec.ambiguous.end()));
  }
  if (spec.type == "subprocess") {
    SubprocessModel::Options opts;
    opts.top_k = spec.top_k;
    opts.timeout_seconds = spec.timeout_seconds;
    return std::make_shared<SubprocessModel>(spec.command, opts);
  }
  throw HarnessError("unknown model type: " + spec.type);
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

double parse_k_or_rho(const std::string& s) {
  try {
    return std::stod(s);
  } catch (...) {
    return 0.0;
  }
}

void sort_rows(std::vector<SweepRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.policy != b.policy) return a.policy < b.policy;
    double ka = parse_k_or_rho(a.k_or_rho);
    double kb = parse_k_or_rho(b.k_or_rho);
    if (ka != kb) return ka < kb;
    if (a.w != b.w) return a.w < b.w;
    return a.b < b.b;
  });
}

void write_rows(const fs::path& file, const std::vector<SweepRow>& rows) {
  std::ofstream out(file);
  if (!out) throw HarnessError("cannot write " + file.string());
  out << kResultsHeader << '\n';
  for (const SweepRow& row : rows) out << format_row(row) << '\n';
}

struct DecodedPoint {
  std::vector<CommitTrace> traces;
  double mean_ms = 0.0;
};

}  // namespace

std::string format_row(const SweepRow& row) {
  std::ostringstream out;
  out << row.policy << ',' << row.k_or_rho << ',' << row.w << ',' << row.b << ','
      << format_double(row.bleu) << ',' << format_double(row.ral) << ','
      << format_double(row.al) << ',' << format_double(row.revision_rate);
  return out.str();
}

std::vector<SweepRow> read_results_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw HarnessError("cannot open results file: " + file.string());
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader)
    throw HarnessError(file.string() + ": missing results header");
  std::vector<SweepRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 8)
      throw HarnessError(file.string() + ":" + std::to_string(line_no) +
                         ": expected 8 columns");
    SweepRow row;
    row.policy = cells[0];
    row.k_or_rho = cells[1];
    row.w = std::stoi(cells[2]);
    row.b = std::stoi(cells[3]);
    row.bleu = std::stod(cells[4]);
    row.ral = std::stod(cells[5]);
    row.al = std::stod(cells[6]);
    row.revision_rate = std::stod(cells[7]);
    rows.push_back(std::move(row));
  }
  return rows;
}

GenResult gen_synthetic_corpus(const GenConfig& config) {
  if (config.n_sentences < 1) throw HarnessError("need at least one sentence");
  if (config.min_len < 1 || config.max_len < config.min_len)
    throw HarnessError("bad length range");

  std::vector<Token> alphabet = config.alphabet;
  if (alphabet.empty()) alphabet = {"ka", "ne", "to", "ri", "so"};

  ModelSpec spec;
  spec.type = "transducer";
  spec.lookahead = config.lookahead;
  spec.sharpness = config.sharpness;
  spec.default_token = "UM";
  for (const Token& t : alphabet) {
    Token upper = t;
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    spec.table[t] = upper;
  }
  for (int i = 0; i < config.n_ambiguous && i < static_cast<int>(alphabet.size()); ++i)
    spec.ambiguous.push_back(alphabet[static_cast<std::size_t>(i)]);

  TransducerModel reference_model(spec.table, spec.lookahead, spec.default_token,
                                  spec.sharpness);

  Rng rng(config.seed);
  std::vector<Sentence> sources;
  std::vector<Sentence> references;
  for (int i = 0; i < config.n_sentences; ++i) {
    int len = rng.range(config.min_len, config.max_len);
    Sentence src;
    for (int j = 0; j < len; ++j)
      src.push_back(alphabet[rng.below(alphabet.size())]);
    references.push_back(reference_model.reference_for(src));
    sources.push_back(std::move(src));
  }

  fs::create_directories(config.output_dir);
  GenResult result;
  result.source_file = config.output_dir / "source.txt";
  result.reference_file = config.output_dir / "reference.txt";
  result.model_file = config.output_dir / "model.json";
  result.model = spec;
  write_corpus(result.source_file, sources);
  write_corpus(result.reference_file, references);
  model_spec_to_json_file(spec, result.model_file);
  return result;
}

namespace {

DecodedPoint decode_point(const IncrementalModel& model, const Policy* policy,
                          const std::string& kind, const std::vector<Sentence>& sources,
                          int w, int b, const DecodeOptions& options) {
  DecodedPoint point;
  auto start = std::chrono::steady_clock::now();
  for (const Sentence& src : sources) {
    if (kind == "retranslation") {
      point.traces.push_back(decode_retranslation(model, src, b, options));
    } else if (kind == "full_sentence") {
      point.traces.push_back(full_sentence_trace(model, src, b, options));
    } else {
      point.traces.push_back(decode_simultaneous(model, *policy, src, w, b, options));
    }
  }
  auto elapsed = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  point.mean_ms = elapsed / static_cast<double>(sources.size());
  return point;
}

std::string trace_file_name(const SweepRow& row) {
  std::string k = row.k_or_rho;
  for (char& c : k)
    if (c == '.') c = '_';
  return row.policy + "_p" + k + "_w" + std::to_string(row.w) + "_b" +
         std::to_string(row.b) + ".jsonl";
}

}  // namespace

SweepResultSet run_sweep(const SweepConfig& config) {
  std::vector<Sentence> sources = load_corpus(config.source_file);
  if (config.reference_files.empty()) throw HarnessError("no reference files");
  std::vector<std::vector<Sentence>> reference_sets(sources.size());
  for (const fs::path& rf : config.reference_files) {
    std::vector<Sentence> ref = load_corpus(rf);
    if (ref.size() != sources.size())
      throw HarnessError("line count mismatch between " + config.source_file.string() +
                         " and " + rf.string());
    for (std::size_t i = 0; i < ref.size(); ++i)
      reference_sets[i].push_back(std::move(ref[i]));
  }

  std::shared_ptr<IncrementalModel> model = build_model(config.model, sources);

  fs::create_directories(config.output_dir);
  fs::path trace_dir = config.output_dir / "traces";
  if (config.write_traces) fs::create_directories(trace_dir);

  struct Point {
    SweepRow row;
    std::string kind;
    std::unique_ptr<Policy> policy;
  };
  std::vector<Point> points;
  for (int k : config.k_values) {
    for (int w : config.windows) {
      for (int b : config.beam_sizes) {
        Point p;
        p.kind = "wait_k";
        p.policy = std::make_unique<WaitKPolicy>(k);
        p.row.policy = "wait_k";
        p.row.k_or_rho = std::to_string(k);
        p.row.w = w;
        p.row.b = b;
        points.push_back(std::move(p));
      }
    }
  }
  for (double rho : config.rho_values) {
    for (int w : config.windows) {
      for (int b : config.beam_sizes) {
        Point p;
        p.kind = "threshold";
        p.policy = std::make_unique<ThresholdPolicy>(rho);
        p.row.policy = "threshold";
        p.row.k_or_rho = format_double(rho);
        p.row.w = w;
        p.row.b = b;
        points.push_back(std::move(p));
      }
    }
  }
  if (config.include_retranslation) {
    for (int b : config.beam_sizes) {
      Point p;
      p.kind = "retranslation";
      p.row.policy = "retranslation";
      p.row.k_or_rho = "0";
      p.row.w = 0;
      p.row.b = b;
      points.push_back(std::move(p));
    }
  }
  if (config.include_fullsentence) {
    for (int b : config.beam_sizes) {
      Point p;
      p.kind = "full_sentence";
      p.row.policy = "full_sentence";
      p.row.k_or_rho = "0";
      p.row.w = 0;
      p.row.b = b;
      points.push_back(std::move(p));
    }
  }

  SweepResultSet results;
  for (Point& point : points) {
    DecodedPoint decoded = decode_point(*model, point.policy.get(), point.kind, sources,
                                        point.row.w, point.row.b, config.decode);
    for (const CommitTrace& trace : decoded.traces) {
      std::optional<int> bound;
      if (point.kind == "wait_k" || point.kind == "threshold") bound = point.row.w;
      if (auto violation = trace_validate(trace, bound))
        throw HarnessError("invalid trace from " + point.row.policy + ": " + *violation);
    }
    MetricsReport report = compute_report(decoded.traces, reference_sets);
    point.row.bleu = report.bleu;
    point.row.ral = report.ral;
    point.row.al = report.al;
    point.row.revision_rate = report.revision_rate;
    point.row.mean_sentence_ms = decoded.mean_ms;

    if (config.write_traces) {
      std::ofstream out(trace_dir / trace_file_name(point.row));
      for (const CommitTrace& trace : decoded.traces) trace_to_stream(trace, out);
    }
    results.rows.push_back(point.row);
  }

  sort_rows(results.rows);
  write_rows(config.output_dir / "results.csv", results.rows);

  if (config.write_timings) {
    std::ofstream out(config.output_dir / "timings.csv");
    out << kResultsHeader << ",mean_sentence_ms\n";
    for (const SweepRow& row : results.rows)
      out << format_row(row) << ',' << format_double(row.mean_sentence_ms) << '\n';
  }
  return results;
}

std::vector<SweepRow> best_beam_selection(const std::vector<SweepRow>& rows) {
  std::map<std::tuple<std::string, std::string, int>, SweepRow> best;
  for (const SweepRow& row : rows) {
    auto key = std::make_tuple(row.policy, row.k_or_rho, row.w);
    auto it = best.find(key);
    if (it == best.end()) {
      best.emplace(key, row);
      continue;
    }
    const SweepRow& cur = it->second;
    bool wins = row.bleu > cur.bleu ||
                (row.bleu == cur.bleu &&
                 (row.ral < cur.ral || (row.ral == cur.ral && row.b < cur.b)));
    if (wins) it->second = row;
  }
  std::vector<SweepRow> out;
  for (const auto& [key, row] : best) out.push_back(row);
  sort_rows(out);
  return out;
}

void emit_plot_data(const std::vector<SweepRow>& rows, const fs::path& output_dir) {
  if (rows.empty()) throw HarnessError("no rows to plot");
  fs::create_directories(output_dir);
  std::vector<SweepRow> sorted = rows;
  sort_rows(sorted);

  auto is_baseline = [](const SweepRow& r) {
    return r.policy == "retranslation" || r.policy == "full_sentence";
  };

  std::vector<SweepRow> by_window;
  std::vector<SweepRow> by_beam;
  for (const SweepRow& r : sorted) {
    if (r.b == 1 || is_baseline(r)) by_window.push_back(r);
    if (r.w == 3 || is_baseline(r)) by_beam.push_back(r);
  }
  write_rows(output_dir / "bleu_vs_ral.csv", sorted);
  write_rows(output_dir / "revrate_vs_window.csv", by_window);
  write_rows(output_dir / "revrate_vs_beam.csv", by_beam);
}

}  // namespace simulmt
