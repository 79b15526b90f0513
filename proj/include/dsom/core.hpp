#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dsom/dissim.hpp"
#include "dsom/error.hpp"
#include "dsom/partition.hpp"
#include "dsom/representation.hpp"
#include "dsom/topology.hpp"

namespace dsom {

/// Prototypes (data indices), assignment of individuals to nodes and the
/// resulting classes after one iteration.
struct MapState {
  std::vector<std::size_t> prototypes;
  std::vector<std::size_t> assignment;
  Classes classes;
  std::size_t iteration = 0;
};

struct AffectationStats {
  std::uint64_t collisions_encountered = 0;  // individuals with a tied argmin
  std::uint64_t neighbors_considered = 0;    // neighbour terms summed in tie-breaks
  double mean_neighbors_considered = 0.0;    // per individual
};

/// M distinct data indices drawn uniformly without replacement.
inline std::vector<std::size_t> init_prototypes(std::size_t n, std::size_t m,
                                                std::uint64_t seed) {
  if (m == 0) throw InvalidInput("map must have at least one node");
  if (m > n) {
    throw InvalidInput("cannot pick " + std::to_string(m) +
                       " distinct prototypes among " + std::to_string(n) +
                       " individuals");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates with an explicit draw so the result does not depend
  // on the standard library's shuffle implementation.
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t r = j + static_cast<std::size_t>(rng() % (n - j));
    std::swap(pool[j], pool[r]);
  }
  pool.resize(m);
  return pool;
}

struct Affectation {
  std::vector<std::size_t> assignment;
  AffectationStats stats;
};

/// Assigns each individual to the node with the closest prototype. Ties are
/// resolved by comparing, for growing graph radius r, the summed distance to
/// every prototype within radius r of each tied node (accumulated in the
/// node's distance order); a tie that survives up to the graph diameter goes
/// to the smallest node index.
inline Affectation affect_all(const DissimilarityMatrix& matrix, const MapGraph& graph,
                              std::span<const std::size_t> prototypes) {
  const std::size_t n = matrix.size();
  const std::size_t m = graph.size();
  if (prototypes.size() != m) throw InvalidInput("one prototype per node is required");
  for (std::size_t p : prototypes) {
    if (p >= n) throw InvalidInput("prototype index out of range");
  }

  Affectation out;
  out.assignment.resize(n);
  std::vector<double> dist(m);
  std::vector<std::size_t> tied;
  std::vector<std::size_t> next;
  std::vector<double> ring_sum(m);
  std::vector<std::size_t> ring_pos(m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = matrix.row(i);
    double best = kInfinity;
    tied.clear();
    for (std::size_t j = 0; j < m; ++j) {
      dist[j] = row[prototypes[j]];
      if (dist[j] < best) {
        best = dist[j];
        tied.assign(1, j);
      } else if (dist[j] == best) {
        tied.push_back(j);
      }
    }
    if (tied.size() > 1) {
      ++out.stats.collisions_encountered;
      // Ring sums grow with r; each candidate walks its distance order once.
      for (std::size_t j : tied) {
        ring_sum[j] = 0.0;
        ring_pos[j] = 0;
      }
      for (int r = 1; r <= graph.diameter() && tied.size() > 1; ++r) {
        double best_sum = kInfinity;
        next.clear();
        for (std::size_t j : tied) {
          const auto order = graph.by_distance(j);
          std::size_t& pos = ring_pos[j];
          double& sum = ring_sum[j];
          while (pos < m && graph.delta(j, order[pos]) <= r) {
            sum += dist[order[pos]];
            if (order[pos] != j) ++out.stats.neighbors_considered;
            ++pos;
          }
          if (sum < best_sum) {
            best_sum = sum;
            next.assign(1, j);
          } else if (sum == best_sum) {
            next.push_back(j);
          }
        }
        tied.swap(next);
      }
    }
    out.assignment[i] = tied.front();
  }
  out.stats.mean_neighbors_considered =
      n == 0 ? 0.0
             : static_cast<double>(out.stats.neighbors_considered) /
                   static_cast<double>(n);
  return out;
}

/// sum_i sum_j h(c(i), j) d(i, m_j) as one running sum, i then j ascending.
inline double energy(const DissimilarityMatrix& matrix, const NeighborhoodTable& h,
                     std::span<const std::size_t> assignment,
                     std::span<const std::size_t> prototypes) {
  double e = 0.0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const auto row = matrix.row(i);
    const auto hc = h.column(assignment[i]);
    for (std::size_t j = 0; j < prototypes.size(); ++j) e += hc[j] * row[prototypes[j]];
  }
  return e;
}

inline double energy(const DissimilarityMatrix& matrix, const MapGraph& graph,
                     const NeighborhoodSchedule& schedule, std::size_t l,
                     const MapState& state) {
  return energy(matrix, NeighborhoodTable(graph, schedule, l), state.assignment,
                state.prototypes);
}

struct IterationRecord {
  std::size_t iteration = 0;
  double temperature = 0.0;
  double energy = 0.0;
  std::vector<std::size_t> prototypes;  // after representation
  std::vector<std::size_t> assignment;  // from affectation
  std::vector<std::size_t> class_sizes;
  AffectationStats affectation;
  RepresentationStats representation;
};

struct Trace {
  std::vector<std::size_t> initial_prototypes;
  std::vector<IterationRecord> iterations;

  MapState final_state(std::size_t m) const {
    MapState s;
    if (iterations.empty()) {
      s.prototypes = initial_prototypes;
      return s;
    }
    const auto& last = iterations.back();
    s.prototypes = last.prototypes;
    s.assignment = last.assignment;
    s.classes = classes_from_assignment(last.assignment, m);
    s.iteration = last.iteration;
    return s;
  }
};

/// Batch DSOM with a caller-supplied representation phase
/// `represent(h, classes, stats) -> prototypes`. Iteration l assigns with the
/// prototypes of iteration l-1, then represents under h^l.
template <class RepresentFn>
Trace run_dsom_with(const DissimilarityMatrix& matrix, const MapGraph& graph,
                    const NeighborhoodSchedule& schedule,
                    std::vector<std::size_t> initial_prototypes,
                    RepresentFn&& represent) {
  schedule.validate();
  const std::size_t m = graph.size();
  Trace trace;
  trace.initial_prototypes = initial_prototypes;
  trace.iterations.reserve(schedule.iterations);
  std::vector<std::size_t> prototypes = std::move(initial_prototypes);
  for (std::size_t l = 0; l < schedule.iterations; ++l) {
    IterationRecord rec;
    rec.iteration = l;
    rec.temperature = temperature(schedule, l);
    Affectation aff = affect_all(matrix, graph, prototypes);
    const Classes classes = classes_from_assignment(aff.assignment, m);
    const NeighborhoodTable h(graph, rec.temperature);
    prototypes = represent(h, classes, rec.representation);
    rec.energy = energy(matrix, h, aff.assignment, prototypes);
    rec.prototypes = prototypes;
    rec.assignment = std::move(aff.assignment);
    rec.affectation = aff.stats;
    rec.class_sizes.reserve(m);
    for (const auto& c : classes) rec.class_sizes.push_back(c.size());
    trace.iterations.push_back(std::move(rec));
  }
  return trace;
}

inline Trace run_dsom(const DissimilarityMatrix& matrix, const MapGraph& graph,
                      const NeighborhoodSchedule& schedule, const Strategy& strategy,
                      std::uint64_t seed) {
  Representer rep(strategy);
  return run_dsom_with(matrix, graph, schedule,
                       init_prototypes(matrix.size(), graph.size(), seed),
                       [&](const NeighborhoodTable& h, const Classes& classes,
                           RepresentationStats& stats) {
                         return rep(matrix, graph, h, classes, stats);
                       });
}

/// Location of the first disagreement between two traces.
struct Divergence {
  std::size_t iteration = 0;  // npos for the initial prototypes
  std::string field;          // "prototype", "assignment" or "length"
  std::size_t index = 0;      // node or individual

  std::string describe() const {
    std::string where = iteration == static_cast<std::size_t>(-1)
                            ? std::string("initialization")
                            : "iteration " + std::to_string(iteration);
    return where + ": " + field + " " + std::to_string(index) + " differs";
  }
};

/// Compares prototypes and assignments of every iteration bit for bit.
inline std::optional<Divergence> compare_traces(const Trace& a, const Trace& b) {
  auto first_diff = [](std::span<const std::size_t> x,
                       std::span<const std::size_t> y) -> std::optional<std::size_t> {
    const std::size_t len = std::min(x.size(), y.size());
    for (std::size_t i = 0; i < len; ++i) {
      if (x[i] != y[i]) return i;
    }
    if (x.size() != y.size()) return len;
    return std::nullopt;
  };
  constexpr auto kInit = static_cast<std::size_t>(-1);
  if (auto d = first_diff(a.initial_prototypes, b.initial_prototypes)) {
    return Divergence{kInit, "prototype", *d};
  }
  const std::size_t len = std::min(a.iterations.size(), b.iterations.size());
  for (std::size_t l = 0; l < len; ++l) {
    const auto& ra = a.iterations[l];
    const auto& rb = b.iterations[l];
    if (auto d = first_diff(ra.assignment, rb.assignment)) {
      return Divergence{l, "assignment", *d};
    }
    if (auto d = first_diff(ra.prototypes, rb.prototypes)) {
      return Divergence{l, "prototype", *d};
    }
  }
  if (a.iterations.size() != b.iterations.size()) return Divergence{len, "length", 0};
  return std::nullopt;
}

}  // namespace dsom
