#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "simulmt/decoder.hpp"
#include "simulmt/metrics.hpp"
#include "simulmt/model.hpp"
#include "simulmt/policy.hpp"

namespace simulmt {

struct HarnessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Plain text corpus: one sentence per line, whitespace-tokenized.
std::vector<Sentence> load_corpus(const std::filesystem::path& file);
void write_corpus(const std::filesystem::path& file, const std::vector<Sentence>& lines);

struct ModelSpec {
  std::string type;  // "echo", "transducer", "subprocess"
  // transducer parameters
  std::map<Token, Token> table;
  int lookahead = 0;
  Token default_token = "<unk>";
  double sharpness = 1.0;
  std::vector<Token> ambiguous;
  // subprocess parameters
  std::vector<std::string> command;
  int top_k = 16;
  double timeout_seconds = 10.0;
};

ModelSpec model_spec_from_json_file(const std::filesystem::path& file);
void model_spec_to_json_file(const ModelSpec& spec, const std::filesystem::path& file);
// `sources` supplies the alphabet for the builtin echo model.
std::shared_ptr<IncrementalModel> build_model(const ModelSpec& spec,
                                              const std::vector<Sentence>& sources);

struct SweepConfig {
  std::filesystem::path source_file;
  std::vector<std::filesystem::path> reference_files;  // at least one
  ModelSpec model;
  std::vector<int> k_values;
  std::vector<double> rho_values;
  std::vector<int> windows;     // w >= 0
  std::vector<int> beam_sizes;  // b >= 1
  bool include_retranslation = false;
  bool include_fullsentence = false;
  std::filesystem::path output_dir;
  std::uint64_t seed = 1;
  bool write_traces = true;
  bool write_timings = false;
  DecodeOptions decode;
};

struct SweepRow {
  std::string policy;    // wait_k | threshold | retranslation | full_sentence
  std::string k_or_rho;  // printed form; "0" for baselines
  int w = 0;
  int b = 1;
  double bleu = 0.0;
  double ral = 0.0;
  double al = 0.0;
  double revision_rate = 0.0;
  double mean_sentence_ms = 0.0;
};

inline const char* kResultsHeader = "policy,k_or_rho,w,b,bleu,ral,al,revision_rate";

struct SweepResultSet {
  std::vector<SweepRow> rows;
};

// Decodes the corpus at every grid point, writes per-sentence trace JSONL and
// results.csv under config.output_dir, and returns the rows.
SweepResultSet run_sweep(const SweepConfig& config);

struct GenConfig {
  std::uint64_t seed = 1;
  int n_sentences = 100;
  int min_len = 4;
  int max_len = 8;
  std::vector<Token> alphabet;  // defaults to the builtin 5-token alphabet
  int lookahead = 2;
  double sharpness = 0.7;
  int n_ambiguous = 1;  // alphabet tokens given a garden-path mapping
  std::filesystem::path output_dir;
};

struct GenResult {
  std::filesystem::path source_file;
  std::filesystem::path reference_file;
  std::filesystem::path model_file;
  ModelSpec model;
};

// Writes source.txt / reference.txt / model.json; references are the model's
// converged output for each source line.
GenResult gen_synthetic_corpus(const GenConfig& config);

// Best beam per (policy, k_or_rho, w): highest BLEU, ties to lower RAL, then
// smaller b.
std::vector<SweepRow> best_beam_selection(const std::vector<SweepRow>& rows);

// bleu_vs_ral.csv, revrate_vs_window.csv, revrate_vs_beam.csv.
void emit_plot_data(const std::vector<SweepRow>& rows,
                    const std::filesystem::path& output_dir);

std::string format_row(const SweepRow& row);
std::vector<SweepRow> read_results_csv(const std::filesystem::path& file);

// CLI entry (gen | sweep | metrics | plotdata); returns the process exit code.
int run_cli(const std::vector<std::string>& args);

}  // namespace simulmt
