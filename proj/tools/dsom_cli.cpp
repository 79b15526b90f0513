// Command-line front end: dataset generation, experiment runs and
// cross-strategy verification.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dsom/dsom.hpp"

namespace {

struct DatasetOptions {
  std::string matrix;
  std::string words;
  std::size_t uniform_n = 0;
  std::uint64_t data_seed = 1;
};

void add_dataset_options(CLI::App* cmd, DatasetOptions& opts) {
  auto* m = cmd->add_option("--matrix", opts.matrix, "dissimilarity matrix file");
  auto* w = cmd->add_option("--words", opts.words,
                            "word list (normalized Levenshtein matrix)");
  auto* u = cmd->add_option("--uniform", opts.uniform_n,
                            "generate N uniform points in the unit square");
  cmd->add_option("--data-seed", opts.data_seed, "seed for --uniform")
      ->capture_default_str();
  m->excludes(w)->excludes(u);
  w->excludes(u);
}

dsom::DatasetSpec dataset_spec(const DatasetOptions& opts) {
  if (!opts.matrix.empty()) return dsom::MatrixFile{opts.matrix};
  if (!opts.words.empty()) return dsom::WordFile{opts.words};
  if (opts.uniform_n > 0) return dsom::UniformDataset{opts.uniform_n, opts.data_seed};
  throw dsom::InvalidInput("one of --matrix, --words or --uniform is required");
}

struct MapOptions {
  std::size_t rows = 7;
  std::size_t cols = 7;
  std::string layout = "hex";
  std::size_t iterations = 100;
  std::optional<double> t0;
  std::optional<double> tf;
  std::uint64_t seed = 1;
  std::string strategies = "all";
};

void add_map_options(CLI::App* cmd, MapOptions& opts) {
  cmd->add_option("--rows", opts.rows, "grid rows")->capture_default_str();
  cmd->add_option("--cols", opts.cols, "grid columns")->capture_default_str();
  cmd->add_option("--layout", opts.layout, "hex or rect")->capture_default_str();
  cmd->add_option("--iters", opts.iterations, "iterations")->capture_default_str();
  cmd->add_option("--t0", opts.t0, "initial temperature (default: grid diameter)");
  cmd->add_option("--tf", opts.tf, "final temperature (default: 0.3)");
  cmd->add_option("--seed", opts.seed, "prototype initialization seed")
      ->capture_default_str();
  cmd->add_option("--strategies", opts.strategies,
                  "comma-separated strategy ids, or 'all'")
      ->capture_default_str();
}

dsom::ExperimentConfig make_config(const DatasetOptions& data, const MapOptions& map) {
  dsom::ExperimentConfig config;
  config.dataset = dataset_spec(data);
  config.rows = map.rows;
  config.cols = map.cols;
  config.layout = dsom::parse_layout(map.layout);
  config.iterations = map.iterations;
  config.t0 = map.t0;
  config.tf = map.tf;
  config.seed = map.seed;
  config.strategies = dsom::parse_strategy_list(map.strategies);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dissimilarity self-organizing map with branch-and-bound representation"};
  app.require_subcommand(1);

  std::size_t gen_n = 0;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-uniform", "write N uniform points in [0,1)^2");
  gen->add_option("--n", gen_n, "number of points")->required();
  gen->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
  gen->add_option("--out", gen_out, "output point file")->required();

  std::string from_points, from_words, matrix_out;
  auto* mat = app.add_subcommand("matrix", "build a dissimilarity matrix file");
  auto* fp = mat->add_option("--from-points", from_points,
                             "point file, squared Euclidean distances");
  auto* fw = mat->add_option("--from-words", from_words,
                             "word list, normalized Levenshtein distances");
  fp->excludes(fw);
  mat->add_option("--out", matrix_out, "output matrix file")->required();

  DatasetOptions run_data;
  MapOptions run_map;
  std::string report_path, trace_path;
  std::size_t timed_runs = 5;
  auto* run = app.add_subcommand("run", "time strategies and write a report");
  add_dataset_options(run, run_data);
  add_map_options(run, run_map);
  run->add_option("--report", report_path, "report file (default: stdout)");
  run->add_option("--trace", trace_path, "per-iteration counter records");
  run->add_option("--repeats", timed_runs, "timed runs per strategy")
      ->capture_default_str();

  DatasetOptions verify_data;
  MapOptions verify_map;
  auto* verify = app.add_subcommand("verify", "check that strategies agree bit for bit");
  add_dataset_options(verify, verify_data);
  add_map_options(verify, verify_map);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const auto points = dsom::gen_uniform(gen_n, gen_seed);
      std::ofstream out(gen_out);
      if (!out) throw dsom::Error("cannot open '" + gen_out + "' for writing");
      dsom::write_points(points, out);
    } else if (*mat) {
      if (from_points.empty() == from_words.empty()) {
        throw dsom::InvalidInput("exactly one of --from-points or --from-words is required");
      }
      const auto m = from_points.empty()
                         ? dsom::levenshtein_matrix(dsom::load_words(from_words))
                         : dsom::sq_euclidean_matrix(dsom::load_points(from_points));
      dsom::save_matrix(m, matrix_out);
    } else if (*run) {
      auto config = make_config(run_data, run_map);
      config.timed_runs = timed_runs;
      const auto report = dsom::run_experiment(config);
      if (report_path.empty()) {
        dsom::write_report(report, std::cout);
      } else {
        dsom::write_report(report, report_path);
      }
      if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        if (!out) throw dsom::Error("cannot open '" + trace_path + "' for writing");
        bool header = true;
        for (const auto& r : report.results) {
          dsom::write_stats(r.strategy, r.trace, out, header);
          header = false;
        }
      }
    } else if (*verify) {
      const auto config = make_config(verify_data, verify_map);
      const auto verdict = dsom::verify_equivalence(config);
      std::cout << verdict.describe() << '\n';
      return verdict.identical ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
