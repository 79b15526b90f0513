#pragma once

#include <time.h>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dsom/core.hpp"
#include "dsom/dissim.hpp"
#include "dsom/error.hpp"
#include "dsom/representation.hpp"
#include "dsom/topology.hpp"

namespace dsom {

/// n points uniform in [0, 1)^2. Uses the top 53 bits of each 64-bit draw,
/// so the output only depends on the seed.
inline std::vector<Point> gen_uniform(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidInput("need at least one point");
  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<Point> points(n);
  for (auto& p : points) {
    p.x = unit();
    p.y = unit();
  }
  return points;
}

struct UniformDataset {
  std::size_t n = 500;
  std::uint64_t seed = 1;
};
struct MatrixFile {
  std::string path;
};
struct WordFile {
  std::string path;
};
using DatasetSpec = std::variant<UniformDataset, MatrixFile, WordFile>;

inline std::string dataset_label(const DatasetSpec& spec) {
  struct {
    std::string operator()(const UniformDataset& d) const {
      return "uniform(seed=" + std::to_string(d.seed) + ")";
    }
    std::string operator()(const MatrixFile& d) const { return "matrix:" + d.path; }
    std::string operator()(const WordFile& d) const { return "words:" + d.path; }
  } visitor;
  return std::visit(visitor, spec);
}

inline DissimilarityMatrix load_dataset(const DatasetSpec& spec) {
  struct {
    DissimilarityMatrix operator()(const UniformDataset& d) const {
      const auto points = gen_uniform(d.n, d.seed);
      return sq_euclidean_matrix(points);
    }
    DissimilarityMatrix operator()(const MatrixFile& d) const {
      return load_matrix(d.path);
    }
    DissimilarityMatrix operator()(const WordFile& d) const {
      const auto words = load_words(d.path);
      return levenshtein_matrix(words);
    }
  } visitor;
  return std::visit(visitor, spec);
}

struct ExperimentConfig {
  DatasetSpec dataset = UniformDataset{};
  std::size_t rows = 7;
  std::size_t cols = 7;
  Layout layout = Layout::hexagonal;
  std::optional<double> t0;  // default: graph diameter
  std::optional<double> tf;  // default: kDefaultFinalTemperature
  std::size_t iterations = 100;
  std::vector<Strategy> strategies;
  std::uint64_t seed = 1;  // prototype initialization
  std::size_t warmup_runs = 1;
  std::size_t timed_runs = 5;
  std::size_t workers = 1;

  void validate() const {
    if (strategies.empty()) throw InvalidInput("at least one strategy is required");
    if (iterations == 0) throw InvalidInput("at least one iteration is required");
    if (rows == 0 || cols == 0) throw InvalidInput("grid dimensions must be positive");
    if (timed_runs == 0) throw InvalidInput("at least one timed run is required");
    if (workers != 1) throw InvalidInput("only single-worker runs are supported");
  }

  NeighborhoodSchedule schedule(const MapGraph& graph) const {
    NeighborhoodSchedule s = default_schedule(graph, iterations);
    if (tf) s.tf = *tf;
    s.t0 = t0 ? *t0 : std::max(static_cast<double>(graph.diameter()), s.tf);
    s.validate();
    return s;
  }
};

/// Counters averaged per iteration.
struct MeanStats {
  double score_evaluations = 0;
  double exhaustive_searches = 0;
  double pruned_classes = 0;
  double bound_terms_summed = 0;
  double d_columns_recomputed = 0;
  double lambda_entries_recomputed = 0;
  double matrix_reads = 0;
  double collisions = 0;
  double mean_neighbors_considered = 0;
};

/// Averages over iterations [first, end) of the trace.
inline MeanStats mean_stats(const Trace& trace, std::size_t first = 0) {
  MeanStats out;
  const auto& its = trace.iterations;
  if (first >= its.size()) return out;
  for (std::size_t l = first; l < its.size(); ++l) {
    const auto& r = its[l].representation;
    out.score_evaluations += static_cast<double>(r.score_evaluations);
    out.exhaustive_searches += static_cast<double>(r.exhaustive_searches);
    out.pruned_classes += static_cast<double>(r.pruned_classes);
    out.bound_terms_summed += static_cast<double>(r.bound_terms_summed);
    out.d_columns_recomputed += static_cast<double>(r.d_columns_recomputed);
    out.lambda_entries_recomputed += static_cast<double>(r.lambda_entries_recomputed);
    out.matrix_reads += static_cast<double>(r.matrix_reads);
    out.collisions += static_cast<double>(its[l].affectation.collisions_encountered);
    out.mean_neighbors_considered += its[l].affectation.mean_neighbors_considered;
  }
  const auto count = static_cast<double>(its.size() - first);
  for (double* v : {&out.score_evaluations, &out.exhaustive_searches, &out.pruned_classes,
                    &out.bound_terms_summed, &out.d_columns_recomputed,
                    &out.lambda_entries_recomputed, &out.matrix_reads, &out.collisions,
                    &out.mean_neighbors_considered}) {
    *v /= count;
  }
  return out;
}

/// Process CPU time in seconds.
inline double cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_PROCESS_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

struct StrategyResult {
  std::string strategy;
  std::vector<double> cpu_times;
  double median_cpu_seconds = 0.0;
  std::optional<double> speedup;  // reference time / this time
  MeanStats stats;
  double final_energy = 0.0;
  Trace trace;
};

struct RunReport {
  std::string dataset;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  Layout layout = Layout::hexagonal;
  NeighborhoodSchedule schedule;
  std::uint64_t seed = 0;
  std::size_t warmup_runs = 0;
  std::size_t timed_runs = 0;
  std::size_t workers = 1;
  std::string reference;  // strategy used for speedups, empty if none
  std::vector<StrategyResult> results;
};

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

inline const std::string kReferenceStrategy = "partial-sums";

/// One untimed warmup run and `timed_runs` CPU-timed runs per strategy, each
/// produced by `runner(strategy, schedule) -> Trace`. Every run must
/// reproduce the warmup trace and every strategy must reproduce the first
/// strategy's trace; otherwise no report is produced and a DeterminismError
/// is thrown.
template <class Runner>
RunReport run_experiment_with(const ExperimentConfig& config, std::size_t n,
                              Runner&& runner) {
  config.validate();
  const MapGraph graph = build_grid(config.rows, config.cols, config.layout);
  RunReport report;
  report.dataset = dataset_label(config.dataset);
  report.n = n;
  report.m = graph.size();
  report.rows = config.rows;
  report.cols = config.cols;
  report.layout = config.layout;
  report.schedule = config.schedule(graph);
  report.seed = config.seed;
  report.warmup_runs = config.warmup_runs;
  report.timed_runs = config.timed_runs;
  report.workers = config.workers;

  for (const Strategy& strategy : config.strategies) {
    StrategyResult res;
    res.strategy = strategy.id();
    res.trace = runner(strategy, report.schedule);
    for (std::size_t w = 1; w < config.warmup_runs; ++w) {
      runner(strategy, report.schedule);
    }
    for (std::size_t r = 0; r < config.timed_runs; ++r) {
      const double start = cpu_seconds();
      Trace t = runner(strategy, report.schedule);
      res.cpu_times.push_back(cpu_seconds() - start);
      if (auto d = compare_traces(res.trace, t)) {
        throw DeterminismError(res.strategy + " is not deterministic: " + d->describe());
      }
    }
    res.median_cpu_seconds = median(res.cpu_times);
    res.stats = mean_stats(res.trace);
    res.final_energy =
        res.trace.iterations.empty() ? 0.0 : res.trace.iterations.back().energy;
    if (!report.results.empty()) {
      const auto& first = report.results.front();
      if (auto d = compare_traces(first.trace, res.trace)) {
        throw DeterminismError("strategies " + first.strategy + " and " + res.strategy +
                               " diverge at " + d->describe());
      }
    }
    report.results.push_back(std::move(res));
  }

  for (const auto& r : report.results) {
    if (r.strategy == kReferenceStrategy) report.reference = r.strategy;
  }
  if (!report.reference.empty()) {
    const auto ref = std::find_if(report.results.begin(), report.results.end(),
                                  [&](const auto& r) { return r.strategy == report.reference; });
    for (auto& r : report.results) {
      if (r.median_cpu_seconds > 0.0 && ref->median_cpu_seconds > 0.0) {
        r.speedup = ref->median_cpu_seconds / r.median_cpu_seconds;
      }
    }
  }
  return report;
}

inline RunReport run_experiment(const ExperimentConfig& config,
                                const DissimilarityMatrix& matrix) {
  config.validate();
  const MapGraph graph = build_grid(config.rows, config.cols, config.layout);
  return run_experiment_with(
      config, matrix.size(),
      [&](const Strategy& strategy, const NeighborhoodSchedule& schedule) {
        return run_dsom(matrix, graph, schedule, strategy, config.seed);
      });
}

inline RunReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  return run_experiment(config, load_dataset(config.dataset));
}

struct EquivalenceVerdict {
  bool identical = true;
  std::vector<std::string> strategies;
  std::string reference;  // strategy every other one is compared with
  std::string divergent;  // first strategy that disagrees, if any
  std::optional<Divergence> divergence;

  std::string describe() const {
    if (identical) {
      return "identical traces across " + std::to_string(strategies.size()) +
             " strategies";
    }
    return divergent + " diverges from " + reference + " at " + divergence->describe();
  }
};

/// Compares every named trace with the first one.
inline EquivalenceVerdict check_equivalence(
    const std::vector<std::pair<std::string, Trace>>& traces) {
  EquivalenceVerdict v;
  for (const auto& [name, trace] : traces) v.strategies.push_back(name);
  if (traces.empty()) return v;
  v.reference = traces.front().first;
  for (std::size_t s = 1; s < traces.size(); ++s) {
    if (auto d = compare_traces(traces.front().second, traces[s].second)) {
      v.identical = false;
      v.divergent = traces[s].first;
      v.divergence = d;
      break;
    }
  }
  return v;
}

inline EquivalenceVerdict verify_equivalence(const ExperimentConfig& config,
                                             const DissimilarityMatrix& matrix) {
  config.validate();
  if (config.strategies.size() < 2) {
    throw InvalidInput("verification needs at least two strategies");
  }
  const MapGraph graph = build_grid(config.rows, config.cols, config.layout);
  const NeighborhoodSchedule schedule = config.schedule(graph);
  std::vector<std::pair<std::string, Trace>> traces;
  for (const auto& s : config.strategies) {
    traces.emplace_back(s.id(), run_dsom(matrix, graph, schedule, s, config.seed));
  }
  return check_equivalence(traces);
}

inline EquivalenceVerdict verify_equivalence(const ExperimentConfig& config) {
  config.validate();
  return verify_equivalence(config, load_dataset(config.dataset));
}

// ---------------------------------------------------------------------------
// Report format: '#'-prefixed "key: value" header lines with the full
// configuration, then a tab-separated table with the columns of
// kReportColumns, one row per strategy. Numbers use the shortest
// round-trip representation; a missing speedup is written as NA.
// ---------------------------------------------------------------------------

inline const std::vector<std::string> kReportColumns = {
    "dataset",           "n",
    "m",                 "strategy",
    "cpu_seconds",       "speedup",
    "score_evaluations", "exhaustive_searches",
    "pruned_classes",    "bound_terms_summed",
    "d_columns_recomputed", "lambda_entries_recomputed",
    "matrix_reads",      "final_energy"};

inline void write_report(const RunReport& report, std::ostream& out) {
  out << "# dataset: " << report.dataset << '\n'
      << "# n: " << report.n << '\n'
      << "# grid: " << report.rows << 'x' << report.cols << ' '
      << to_string(report.layout) << '\n'
      << "# m: " << report.m << '\n'
      << "# t0: " << format_double(report.schedule.t0) << '\n'
      << "# tf: " << format_double(report.schedule.tf) << '\n'
      << "# iterations: " << report.schedule.iterations << '\n'
      << "# seed: " << report.seed << '\n'
      << "# warmup_runs: " << report.warmup_runs << '\n'
      << "# timed_runs: " << report.timed_runs << '\n'
      << "# workers: " << report.workers << '\n'
      << "# timing: process CPU time, median of timed runs\n"
      << "# reference: " << (report.reference.empty() ? "NA" : report.reference) << '\n'
      << "# counters: mean per iteration\n";
  for (std::size_t c = 0; c < kReportColumns.size(); ++c) {
    out << (c ? "\t" : "") << kReportColumns[c];
  }
  out << '\n';
  for (const auto& r : report.results) {
    const auto& s = r.stats;
    out << report.dataset << '\t' << report.n << '\t' << report.m << '\t' << r.strategy
        << '\t' << format_double(r.median_cpu_seconds) << '\t'
        << (r.speedup ? format_double(*r.speedup) : std::string("NA")) << '\t'
        << format_double(s.score_evaluations) << '\t'
        << format_double(s.exhaustive_searches) << '\t'
        << format_double(s.pruned_classes) << '\t'
        << format_double(s.bound_terms_summed) << '\t'
        << format_double(s.d_columns_recomputed) << '\t'
        << format_double(s.lambda_entries_recomputed) << '\t'
        << format_double(s.matrix_reads) << '\t' << format_double(r.final_energy)
        << '\n';
  }
}

inline void write_report(const RunReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_report(report, out);
  if (!out) throw Error("write to '" + path + "' failed");
}

/// Per-iteration counter records: strategy, iteration, score_evaluations,
/// pruned_classes, bound_terms_summed, d_columns_recomputed,
/// lambda_entries_recomputed.
inline void write_stats(const std::string& strategy, const Trace& trace,
                        std::ostream& out, bool header = true) {
  if (header) {
    out << "strategy\titeration\tscore_evaluations\tpruned_classes\tbound_terms_summed"
           "\td_columns_recomputed\tlambda_entries_recomputed\n";
  }
  for (const auto& rec : trace.iterations) {
    const auto& r = rec.representation;
    out << strategy << '\t' << rec.iteration << '\t' << r.score_evaluations << '\t'
        << r.pruned_classes << '\t' << r.bound_terms_summed << '\t'
        << r.d_columns_recomputed << '\t' << r.lambda_entries_recomputed << '\n';
  }
}

namespace detail {
inline std::string join(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}
}  // namespace detail

/// Per-iteration trace: iteration, temperature, energy, prototypes and class
/// sizes (comma-joined), collisions, score evaluations, pruned classes,
/// bound terms, D rows and lambda entries recomputed.
inline void write_trace(const Trace& trace, std::ostream& out) {
  out << "iteration\ttemperature\tenergy\tprototypes\tclass_sizes\tcollisions"
         "\tscore_evaluations\tpruned_classes\tbound_terms_summed"
         "\td_columns_recomputed\tlambda_entries_recomputed\n";
  for (const auto& rec : trace.iterations) {
    const auto& r = rec.representation;
    out << rec.iteration << '\t' << format_double(rec.temperature) << '\t'
        << format_double(rec.energy) << '\t' << detail::join(rec.prototypes) << '\t'
        << detail::join(rec.class_sizes) << '\t'
        << rec.affectation.collisions_encountered << '\t' << r.score_evaluations << '\t'
        << r.pruned_classes << '\t' << r.bound_terms_summed << '\t'
        << r.d_columns_recomputed << '\t' << r.lambda_entries_recomputed << '\n';
  }
}

/// One parsed row of a report table.
struct ReportRow {
  std::vector<std::string> cells;

  const std::string& at(const std::string& column) const {
    const auto it = std::find(kReportColumns.begin(), kReportColumns.end(), column);
    if (it == kReportColumns.end()) throw InvalidInput("unknown column " + column);
    return cells.at(static_cast<std::size_t>(it - kReportColumns.begin()));
  }
  double number(const std::string& column) const {
    double v = 0.0;
    if (!detail::parse_double(at(column), v)) {
      throw InvalidInput("column " + column + " is not numeric");
    }
    return v;
  }
};

inline std::vector<ReportRow> read_report(std::istream& in) {
  std::vector<ReportRow> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    ReportRow row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, '\t')) row.cells.push_back(cell);
    if (!header_seen) {
      if (row.cells != kReportColumns) throw InvalidInput("unexpected report columns");
      header_seen = true;
      continue;
    }
    if (row.cells.size() != kReportColumns.size()) {
      throw InvalidInput("report row has wrong column count");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dsom
