#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "simulmt/harness.hpp"

namespace simulmt {

namespace {

void add_sweep_options(CLI::App* cmd, SweepConfig& config, std::string& model_file,
                       std::string& builtin, std::vector<std::string>& subprocess_cmd) {
  cmd->add_option("--source", config.source_file, "source corpus, one sentence per line")
      ->required();
  cmd->add_option("--refs", config.reference_files, "reference corpora (one or more)")
      ->required();
  cmd->add_option("--model-file", model_file, "model description JSON");
  cmd->add_option("--model", builtin, "builtin model name (echo)");
  cmd->add_option("--subprocess", subprocess_cmd,
                  "external model command line speaking the JSONL protocol");
  cmd->add_option("--k", config.k_values, "wait-k values");
  cmd->add_option("--rho", config.rho_values, "threshold policy rho values");
  cmd->add_option("--w", config.windows, "revisable window sizes");
  cmd->add_option("--b", config.beam_sizes, "beam sizes");
  cmd->add_flag("--retranslation", config.include_retranslation,
                "include the re-translation baseline");
  cmd->add_flag("--fullsentence", config.include_fullsentence,
                "include the full-sentence baseline");
  cmd->add_option("--out", config.output_dir, "output directory")->required();
  cmd->add_option("--seed", config.seed, "seed for any stochastic corpus generation");
  cmd->add_flag("--timings", config.write_timings, "also write timings.csv");
  cmd->add_option("--max-len-ratio", config.decode.max_len_ratio,
                  "target length cap as a multiple of source length");
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"streaming decoding sweeps with revision-aware metrics"};
  app.require_subcommand(1);
  // Any subcommand's options may come from an INI file ([sweep] section etc.);
  // explicit flags override file values.
  app.set_config("--config");

  // gen
  GenConfig gen;
  std::vector<std::string> alphabet;
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic parallel corpus");
  gen_cmd->add_option("--seed", gen.seed, "PRNG seed");
  gen_cmd->add_option("--n", gen.n_sentences, "number of sentences");
  gen_cmd->add_option("--min-len", gen.min_len, "minimum sentence length");
  gen_cmd->add_option("--max-len", gen.max_len, "maximum sentence length");
  gen_cmd->add_option("--alphabet", alphabet, "source alphabet tokens");
  gen_cmd->add_option("--lookahead", gen.lookahead, "model lookahead d");
  gen_cmd->add_option("--sharpness", gen.sharpness, "model sharpness q");
  gen_cmd->add_option("--ambiguous", gen.n_ambiguous,
                      "number of garden-path alphabet tokens");
  gen_cmd->add_option("--out", gen.output_dir, "output directory")->required();

  // sweep
  SweepConfig sweep;
  std::string model_file;
  std::string builtin;
  std::vector<std::string> subprocess_cmd;
  auto* sweep_cmd = app.add_subcommand("sweep", "decode a corpus over a config grid");
  sweep_cmd->configurable();
  add_sweep_options(sweep_cmd, sweep, model_file, builtin, subprocess_cmd);

  // metrics
  std::vector<std::string> trace_files;
  std::vector<std::string> metric_refs;
  auto* metrics_cmd =
      app.add_subcommand("metrics", "recompute reports from stored trace JSONL");
  metrics_cmd->add_option("--traces", trace_files, "trace JSONL files")->required();
  metrics_cmd->add_option("--refs", metric_refs, "reference corpora for BLEU");

  // plotdata
  std::string results_file;
  std::string plot_out;
  bool plot_best = false;
  auto* plot_cmd = app.add_subcommand("plotdata", "split results.csv into plot CSVs");
  plot_cmd->add_option("--results", results_file, "results.csv from a sweep")->required();
  plot_cmd->add_option("--out", plot_out, "output directory")->required();
  plot_cmd->add_flag("--best", plot_best,
                     "also write best_beam.csv (best b per policy/parameter/window)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gen_cmd) {
      gen.alphabet = alphabet;
      GenResult result = gen_synthetic_corpus(gen);
      std::cout << "source:    " << result.source_file.string() << '\n'
                << "reference: " << result.reference_file.string() << '\n'
                << "model:     " << result.model_file.string() << '\n';
    } else if (*sweep_cmd) {
      if (!model_file.empty()) {
        sweep.model = model_spec_from_json_file(model_file);
      } else if (!subprocess_cmd.empty()) {
        sweep.model.type = "subprocess";
        sweep.model.command = subprocess_cmd;
      } else if (!builtin.empty()) {
        sweep.model.type = builtin;
      } else {
        throw HarnessError("one of --model-file, --model, --subprocess is required");
      }
      if (sweep.k_values.empty() && sweep.rho_values.empty() &&
          !sweep.include_retranslation && !sweep.include_fullsentence)
        throw HarnessError("nothing to sweep: give --k and/or --rho or a baseline flag");
      if (sweep.windows.empty()) sweep.windows = {0};
      if (sweep.beam_sizes.empty()) sweep.beam_sizes = {1};
      SweepResultSet results = run_sweep(sweep);
      std::cout << kResultsHeader << '\n';
      for (const SweepRow& row : results.rows) std::cout << format_row(row) << '\n';
      std::cout << "wrote " << (sweep.output_dir / "results.csv").string() << '\n';
    } else if (*metrics_cmd) {
      std::vector<std::vector<Sentence>> reference_sets;
      if (!metric_refs.empty()) {
        std::vector<std::vector<Sentence>> per_file;
        for (const auto& rf : metric_refs) per_file.push_back(load_corpus(rf));
        reference_sets.resize(per_file.front().size());
        for (const auto& refs : per_file) {
          if (refs.size() != reference_sets.size())
            throw HarnessError("reference files disagree on line count");
          for (std::size_t i = 0; i < refs.size(); ++i)
            reference_sets[i].push_back(refs[i]);
        }
      }
      for (const auto& tf : trace_files) {
        std::ifstream in(tf);
        if (!in) throw HarnessError("cannot open trace file: " + tf);
        std::vector<CommitTrace> traces;
        while (in.peek() != EOF) {
          traces.push_back(trace_from_stream(in));
          while (in.peek() == '\n') in.get();
        }
        for (const CommitTrace& t : traces)
          if (auto violation = trace_validate(t))
            throw HarnessError(tf + ": invalid trace: " + *violation);
        if (!reference_sets.empty() && reference_sets.size() != traces.size())
          throw HarnessError(tf + ": trace count does not match references");
        MetricsReport report = compute_report(traces, reference_sets);
        std::cout << tf << ": ral=" << report.ral << " al=" << report.al
                  << " revision_rate=" << report.revision_rate;
        if (!reference_sets.empty()) std::cout << " bleu=" << report.bleu;
        std::cout << '\n';
      }
    } else if (*plot_cmd) {
      std::vector<SweepRow> rows = read_results_csv(results_file);
      emit_plot_data(rows, plot_out);
      if (plot_best) {
        std::vector<SweepRow> best = best_beam_selection(rows);
        std::ofstream out(std::filesystem::path(plot_out) / "best_beam.csv");
        out << kResultsHeader << '\n';
        for (const SweepRow& row : best) out << format_row(row) << '\n';
      }
      std::cout << "wrote plot data under " << plot_out << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace simulmt
