#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dsom/dissim.hpp"
#include "dsom/error.hpp"
#include "dsom/partition.hpp"
#include "dsom/topology.hpp"

namespace dsom {

// Every strategy below evaluates the same floating-point expression for the
// score of candidate k at node j:
//
//   S(j, k) = sum over u ascending of h(u, j) * D(u, k)
//   D(u, k) = sum over i in class u ascending of d(i, k)
//
// starting each sum from 0.0. Strategies only differ in which of these values
// are cached and which candidates are skipped, so their outputs are equal bit
// for bit, not merely within a tolerance.

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kNoCandidate = static_cast<std::size_t>(-1);

/// How the lower bound of a class is evaluated in branch and bound.
enum class BoundKind {
  single_term,            // only the v = j term
  full,                   // all terms, ascending v
  short_circuit,          // ascending v, stop once above the incumbent
  short_circuit_ordered,  // nearest nodes first, stop once above the incumbent
};

enum class Search { naive, partial_sums, branch_and_bound };

struct Strategy {
  Search search = Search::partial_sums;
  BoundKind bound = BoundKind::full;
  bool memoize = false;

  std::string id() const {
    std::string out;
    switch (search) {
      case Search::naive:
        return "naive";
      case Search::partial_sums:
        out = "partial-sums";
        break;
      case Search::branch_and_bound:
        switch (bound) {
          case BoundKind::single_term: out = "bnb-single"; break;
          case BoundKind::full: out = "bnb-full"; break;
          case BoundKind::short_circuit: out = "bnb-sc"; break;
          case BoundKind::short_circuit_ordered: out = "bnb-sco"; break;
        }
        break;
    }
    if (memoize) out += "+memo";
    return out;
  }

  friend bool operator==(const Strategy& a, const Strategy& b) {
    return a.id() == b.id();
  }
};

/// Parses the ids produced by Strategy::id().
inline Strategy parse_strategy(std::string_view id) {
  Strategy s;
  std::string_view base = id;
  constexpr std::string_view kMemo = "+memo";
  if (base.size() > kMemo.size() && base.substr(base.size() - kMemo.size()) == kMemo) {
    s.memoize = true;
    base.remove_suffix(kMemo.size());
  }
  if (base == "naive") {
    if (s.memoize) throw InvalidInput("the naive strategy keeps no cache to memoize");
    s.search = Search::naive;
  } else if (base == "partial-sums") {
    s.search = Search::partial_sums;
  } else if (base == "bnb-single") {
    s = {Search::branch_and_bound, BoundKind::single_term, s.memoize};
  } else if (base == "bnb-full") {
    s = {Search::branch_and_bound, BoundKind::full, s.memoize};
  } else if (base == "bnb-sc") {
    s = {Search::branch_and_bound, BoundKind::short_circuit, s.memoize};
  } else if (base == "bnb-sco") {
    s = {Search::branch_and_bound, BoundKind::short_circuit_ordered, s.memoize};
  } else {
    throw InvalidInput("unknown strategy '" + std::string(id) + "'");
  }
  return s;
}

/// naive, partial-sums and the four branch-and-bound bounds, the cached ones
/// each with memoization off and on.
inline std::vector<Strategy> all_strategies() {
  std::vector<Strategy> out{{Search::naive, BoundKind::full, false},
                            {Search::partial_sums, BoundKind::full, false},
                            {Search::partial_sums, BoundKind::full, true}};
  for (auto kind : {BoundKind::single_term, BoundKind::full, BoundKind::short_circuit,
                    BoundKind::short_circuit_ordered}) {
    out.push_back({Search::branch_and_bound, kind, false});
    out.push_back({Search::branch_and_bound, kind, true});
  }
  return out;
}

/// Comma-separated strategy ids, or "all".
inline std::vector<Strategy> parse_strategy_list(std::string_view list) {
  if (list == "all") return all_strategies();
  std::vector<Strategy> out;
  while (!list.empty()) {
    const auto comma = list.find(',');
    const auto item = list.substr(0, comma);
    if (!item.empty()) out.push_back(parse_strategy(item));
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (out.empty()) throw InvalidInput("strategy list is empty");
  return out;
}

/// Operation counters for one or more representation phases.
struct RepresentationStats {
  std::uint64_t score_evaluations = 0;
  std::uint64_t home_searches = 0;         // home classes scanned
  std::uint64_t exhaustive_searches = 0;   // foreign classes scanned
  std::uint64_t pruned_classes = 0;        // foreign classes skipped
  std::uint64_t bound_terms_summed = 0;
  std::uint64_t d_columns_recomputed = 0;  // rows D(u, .) rebuilt
  std::uint64_t lambda_entries_recomputed = 0;
  std::uint64_t matrix_reads = 0;          // dissimilarity entries read

  RepresentationStats& operator+=(const RepresentationStats& o) {
    score_evaluations += o.score_evaluations;
    home_searches += o.home_searches;
    exhaustive_searches += o.exhaustive_searches;
    pruned_classes += o.pruned_classes;
    bound_terms_summed += o.bound_terms_summed;
    d_columns_recomputed += o.d_columns_recomputed;
    lambda_entries_recomputed += o.lambda_entries_recomputed;
    matrix_reads += o.matrix_reads;
    return *this;
  }

  friend bool operator==(const RepresentationStats&,
                         const RepresentationStats&) = default;
};

/// Partial sums D(u, k) and class minima lambda(v, u) for one partition.
///
/// With memoization, a class is dirty when its membership differs from the
/// previous update; only dirty rows of D are rebuilt, and lambda(v, u) only
/// when u or v is dirty. The tables are bit-identical to a full rebuild.
class PartialSumCache {
 public:
  void update(const DissimilarityMatrix& matrix, const Classes& classes,
              bool memoize, RepresentationStats& stats) {
    const std::size_t n = matrix.size();
    const std::size_t m = classes.size();
    if (n != n_ || m != m_) {
      n_ = n;
      m_ = m;
      by_class_.assign(m * n, 0.0);
      by_candidate_.assign(n * m, 0.0);
      lambda_.assign(m * m, kInfinity);
      snapshot_.clear();
    }
    dirty_.assign(m, 1);
    if (memoize && snapshot_.size() == m) {
      for (std::size_t u = 0; u < m; ++u) dirty_[u] = classes[u] != snapshot_[u];
    }

    for (std::size_t u = 0; u < m; ++u) {
      if (!dirty_[u]) continue;
      double* row = by_class_.data() + u * n;
      std::fill(row, row + n, 0.0);
      for (std::size_t i : classes[u]) {
        const auto di = matrix.row(i);
        for (std::size_t k = 0; k < n; ++k) row[k] += di[k];
      }
      for (std::size_t k = 0; k < n; ++k) by_candidate_[k * m + u] = row[k];
      stats.matrix_reads += classes[u].size() * n;
      ++stats.d_columns_recomputed;
    }

    for (std::size_t u = 0; u < m; ++u) {
      const auto& members = classes[u];
      for (std::size_t v = 0; v < m; ++v) {
        if (!dirty_[u] && !dirty_[v]) continue;
        double best = kInfinity;
        const double* row = by_class_.data() + v * n;
        for (std::size_t k : members) best = std::min(best, row[k]);
        lambda_[u * m + v] = best;
        ++stats.lambda_entries_recomputed;
      }
    }

    occupied_.clear();
    for (std::size_t u = 0; u < m; ++u)
      if (!classes[u].empty()) occupied_.push_back(u);

    snapshot_ = classes;
  }

  std::size_t nodes() const noexcept { return m_; }
  std::size_t individuals() const noexcept { return n_; }

  double d(std::size_t u, std::size_t k) const noexcept {
    return by_class_[u * n_ + k];
  }
  /// D(u, .) over all candidates.
  std::span<const double> d_row(std::size_t u) const noexcept {
    return {by_class_.data() + u * n_, n_};
  }
  /// D(., k) over all classes.
  std::span<const double> d_column(std::size_t k) const noexcept {
    return {by_candidate_.data() + k * m_, m_};
  }
  /// min over k in C_u of D(v, k); +infinity when C_u is empty.
  double lambda(std::size_t v, std::size_t u) const noexcept {
    return lambda_[u * m_ + v];
  }
  /// lambda(., u) over all v.
  std::span<const double> lambda_column(std::size_t u) const noexcept {
    return {lambda_.data() + u * m_, m_};
  }
  bool dirty(std::size_t u) const noexcept { return dirty_[u] != 0; }
  /// Non-empty classes in ascending order. D(u, .) vanishes on the others.
  std::span<const std::size_t> occupied() const noexcept { return occupied_; }

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<double> by_class_;      // [u][k]
  std::vector<double> by_candidate_;  // [k][u]
  std::vector<double> lambda_;        // [u][v]
  std::vector<char> dirty_;
  std::vector<std::size_t> occupied_;
  Classes snapshot_;
};

inline double score(std::size_t j, std::size_t k, const PartialSumCache& cache,
                    const NeighborhoodTable& h) {
  // Empty classes contribute exact zeros, so skipping them keeps the sum.
  const auto hj = h.column(j);
  const auto dk = cache.d_column(k);
  double s = 0.0;
  for (std::size_t u : cache.occupied()) s += hj[u] * dk[u];
  return s;
}

/// Keeps the lowest score; equal scores go to the smaller data index, which
/// is what an ascending exhaustive scan with strict comparison yields.
struct Incumbent {
  double qual = kInfinity;
  std::size_t best = kNoCandidate;

  void offer(double s, std::size_t k) noexcept {
    if (s < qual || (s == qual && k < best)) {
      qual = s;
      best = k;
    }
  }
};

/// Whether a class with lower bound `bound` and smallest member
/// `first_member` can still improve on the incumbent. A bound equal to the
/// incumbent only matters when the class could win the index tie-break.
inline bool must_search(double bound, const Incumbent& inc,
                        std::size_t first_member) noexcept {
  return bound < inc.qual || (bound == inc.qual && first_member < inc.best);
}

/// Brute-force representation: D(u, k) is re-summed from the matrix for every
/// (j, k) pair.
inline std::vector<std::size_t> represent_naive(const DissimilarityMatrix& matrix,
                                                const NeighborhoodTable& h,
                                                const Classes& classes,
                                                RepresentationStats& stats) {
  const std::size_t n = matrix.size();
  const std::size_t m = classes.size();
  std::vector<std::size_t> prototypes(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto hj = h.column(j);
    Incumbent inc;
    for (std::size_t k = 0; k < n; ++k) {
      // d is symmetric, so row k holds d(i, k) contiguously.
      const auto dk = matrix.row(k);
      double s = 0.0;
      for (std::size_t u = 0; u < m; ++u) {
        double d_uk = 0.0;
        for (std::size_t i : classes[u]) d_uk += dk[i];
        s += hj[u] * d_uk;
      }
      inc.offer(s, k);
    }
    stats.score_evaluations += n;
    stats.matrix_reads += n * n;
    prototypes[j] = inc.best;
  }
  return prototypes;
}

/// Exhaustive search over the cached partial sums.
inline std::vector<std::size_t> represent_partial_sums(const PartialSumCache& cache,
                                                       const NeighborhoodTable& h,
                                                       RepresentationStats& stats) {
  const std::size_t n = cache.individuals();
  const std::size_t m = cache.nodes();
  std::vector<std::size_t> prototypes(m);
  std::vector<double> acc(n);
  for (std::size_t j = 0; j < m; ++j) {
    // Same per-candidate operation order as score(), vectorized over k.
    std::fill(acc.begin(), acc.end(), 0.0);
    const auto hj = h.column(j);
    for (std::size_t u = 0; u < m; ++u) {
      const double w = hj[u];
      const auto row = cache.d_row(u);
      for (std::size_t k = 0; k < n; ++k) acc[k] += w * row[k];
    }
    Incumbent inc;
    for (std::size_t k = 0; k < n; ++k) inc.offer(acc[k], k);
    stats.score_evaluations += n;
    prototypes[j] = inc.best;
  }
  return prototypes;
}

namespace detail {

inline double full_bound(std::size_t j, std::size_t u, const PartialSumCache& cache,
                         const NeighborhoodTable& h, RepresentationStats& stats) {
  const auto hj = h.column(j);
  const auto lu = cache.lambda_column(u);
  double z = 0.0;
  for (std::size_t v = 0; v < hj.size(); ++v) z += hj[v] * lu[v];
  stats.bound_terms_summed += hj.size();
  return z;
}

}  // namespace detail

/// Lower bound of min over k in C_u of S(j, k).
///
/// The short-circuit kinds may stop early once the running sum exceeds
/// `qual`; the value returned then still exceeds `qual` and is still a valid
/// lower bound. A completed loop returns exactly the full-bound value, so
/// search decisions never differ from BoundKind::full.
inline double bound(std::size_t j, std::size_t u, const PartialSumCache& cache,
                    const NeighborhoodTable& h, const MapGraph& graph, BoundKind kind,
                    double qual, RepresentationStats& stats) {
  if (std::isinf(cache.lambda(j, u))) return kInfinity;  // empty class
  const auto hj = h.column(j);
  const auto lu = cache.lambda_column(u);
  switch (kind) {
    case BoundKind::single_term:
      ++stats.bound_terms_summed;
      return hj[j] * lu[j];
    case BoundKind::full:
      return detail::full_bound(j, u, cache, h, stats);
    case BoundKind::short_circuit: {
      // Prefix sums in ascending order never exceed the full ascending sum.
      double z = 0.0;
      for (std::size_t v = 0; v < hj.size(); ++v) {
        z += hj[v] * lu[v];
        if (z > qual) {
          stats.bound_terms_summed += v + 1;
          return z;
        }
      }
      stats.bound_terms_summed += hj.size();
      return z;
    }
    case BoundKind::short_circuit_ordered: {
      // Summing in another order can round above the ascending sum by a few
      // ulps, so a stop requires the partial sum to clear `qual` by more than
      // the worst-case summation error, and the deflated value is returned.
      const double slack =
          1.0 + 4.0 * static_cast<double>(hj.size()) *
                    std::numeric_limits<double>::epsilon();
      double z = 0.0;
      std::size_t terms = 0;
      for (std::size_t v : graph.by_distance(j)) {
        z += hj[v] * lu[v];
        ++terms;
        if (z > qual) {
          const double certified = z / slack;
          if (certified > qual) {
            stats.bound_terms_summed += terms;
            return certified;
          }
        }
      }
      stats.bound_terms_summed += terms;
      return detail::full_bound(j, u, cache, h, stats);
    }
  }
  return kInfinity;
}

/// Branch-and-bound search for every node, with a caller-supplied bound
/// function `bound_fn(j, u, incumbent, stats) -> double`. The home class C_j is
/// scanned first, then the other classes in ascending graph distance from j;
/// a class is scanned only when must_search() holds for its bound.
template <class BoundFn>
std::vector<std::size_t> represent_bnb_with(const PartialSumCache& cache,
                                            const NeighborhoodTable& h,
                                            const MapGraph& graph,
                                            const Classes& classes,
                                            BoundFn&& bound_fn,
                                            RepresentationStats& stats) {
  const std::size_t m = cache.nodes();
  std::vector<std::size_t> prototypes(m);
  for (std::size_t j = 0; j < m; ++j) {
    Incumbent inc;
    for (std::size_t k : classes[j]) inc.offer(score(j, k, cache, h), k);
    stats.score_evaluations += classes[j].size();
    ++stats.home_searches;

    for (std::size_t u : graph.by_distance(j)) {
      if (u == j) continue;
      const auto& members = classes[u];
      if (members.empty()) {
        ++stats.pruned_classes;
        continue;
      }
      const double z = bound_fn(j, u, std::as_const(inc), stats);
      if (!must_search(z, inc, members.front())) {
        ++stats.pruned_classes;
        continue;
      }
      for (std::size_t k : members) inc.offer(score(j, k, cache, h), k);
      stats.score_evaluations += members.size();
      ++stats.exhaustive_searches;
    }
    prototypes[j] = inc.best;
  }
  return prototypes;
}

inline std::vector<std::size_t> represent_bnb(const PartialSumCache& cache,
                                              const NeighborhoodTable& h,
                                              const MapGraph& graph,
                                              const Classes& classes, BoundKind kind,
                                              RepresentationStats& stats) {
  return represent_bnb_with(
      cache, h, graph, classes,
      [&](std::size_t j, std::size_t u, const Incumbent& inc, RepresentationStats& st) {
        return bound(j, u, cache, h, graph, kind, inc.qual, st);
      },
      stats);
}

/// Runs one representation phase under `strategy`, refreshing `cache` first
/// when the strategy uses it.
class Representer {
 public:
  explicit Representer(Strategy strategy) : strategy_(strategy) {}

  const Strategy& strategy() const noexcept { return strategy_; }
  const PartialSumCache& cache() const noexcept { return cache_; }

  std::vector<std::size_t> operator()(const DissimilarityMatrix& matrix,
                                      const MapGraph& graph,
                                      const NeighborhoodTable& h,
                                      const Classes& classes,
                                      RepresentationStats& stats) {
    switch (strategy_.search) {
      case Search::naive:
        return represent_naive(matrix, h, classes, stats);
      case Search::partial_sums:
        cache_.update(matrix, classes, strategy_.memoize, stats);
        return represent_partial_sums(cache_, h, stats);
      case Search::branch_and_bound:
        cache_.update(matrix, classes, strategy_.memoize, stats);
        return represent_bnb(cache_, h, graph, classes, strategy_.bound, stats);
    }
    return {};
  }

 private:
  Strategy strategy_;
  PartialSumCache cache_;
};

}  // namespace dsom
