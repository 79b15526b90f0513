#pragma once

// Brute-force reference computations used only by the tests. None of these
// share code paths with the library implementations they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dsom/dsom.hpp"

namespace dsom::oracle {

/// Edit distance by breadth-first search over single-character edits, with
/// intermediate strings capped at max(|a|, |b|) characters and restricted to
/// the characters of a and b.
inline std::size_t edit_distance_bfs(const std::string& a, const std::string& b) {
  std::set<char> alphabet(a.begin(), a.end());
  alphabet.insert(b.begin(), b.end());
  const std::size_t cap = std::max(a.size(), b.size());
  std::map<std::string, std::size_t> seen{{a, 0}};
  std::queue<std::string> queue;
  queue.push(a);
  while (!queue.empty()) {
    const std::string s = queue.front();
    queue.pop();
    const std::size_t d = seen[s];
    if (s == b) return d;
    std::vector<std::string> next;
    for (std::size_t i = 0; i < s.size(); ++i) {
      next.push_back(s.substr(0, i) + s.substr(i + 1));
      for (char c : alphabet) {
        std::string t = s;
        t[i] = c;
        next.push_back(t);
      }
    }
    if (s.size() < cap) {
      for (std::size_t i = 0; i <= s.size(); ++i) {
        for (char c : alphabet) next.push_back(s.substr(0, i) + c + s.substr(i));
      }
    }
    for (auto& t : next) {
      if (seen.emplace(t, d + 1).second) queue.push(t);
    }
  }
  return std::numeric_limits<std::size_t>::max();
}

/// All-pairs graph distances by Floyd-Warshall over adjacency derived from
/// grid coordinates.
inline std::vector<std::vector<int>> grid_distances(std::size_t rows, std::size_t cols,
                                                    Layout layout) {
  const std::size_t m = rows * cols;
  const int inf = 1 << 20;
  std::vector<std::vector<int>> d(m, std::vector<int>(m, inf));
  auto adjacent = [&](long r1, long c1, long r2, long c2) {
    if (r1 == r2) return std::labs(c1 - c2) == 1;
    if (std::labs(r1 - r2) != 1) return false;
    if (c1 == c2) return true;
    if (layout == Layout::rectangular) return false;
    // odd-row offset: an even row also touches column c-1 above and below,
    // an odd row column c+1.
    const long side = (r1 % 2 == 0) ? -1 : 1;
    return c2 == c1 + side;
  };
  for (std::size_t a = 0; a < m; ++a) {
    d[a][a] = 0;
    for (std::size_t b = 0; b < m; ++b) {
      if (a != b && adjacent(static_cast<long>(a / cols), static_cast<long>(a % cols),
                             static_cast<long>(b / cols), static_cast<long>(b % cols))) {
        d[a][b] = 1;
      }
    }
  }
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

/// Class-grouped score: D(u, k) accumulated by filtering the assignment in
/// ascending i, then weighted in ascending u. Same operand order as the
/// library, computed without any cache.
inline double grouped_score(const DissimilarityMatrix& d, const NeighborhoodTable& h,
                            const std::vector<std::size_t>& assignment, std::size_t m,
                            std::size_t j, std::size_t k) {
  double s = 0.0;
  for (std::size_t u = 0; u < m; ++u) {
    double du = 0.0;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (assignment[i] == u) du += d(i, k);
    }
    s += h(u, j) * du;
  }
  return s;
}

/// Ungrouped score: the literal sum over individuals of h(c(i), j) d(i, k).
/// Differs from the grouped form only by rounding.
inline double direct_score(const DissimilarityMatrix& d, const NeighborhoodTable& h,
                           const std::vector<std::size_t>& assignment, std::size_t j,
                           std::size_t k) {
  double s = 0.0;
  for (std::size_t i = 0; i < assignment.size(); ++i) s += h(assignment[i], j) * d(i, k);
  return s;
}

/// Energy as the literal double sum.
inline double energy(const DissimilarityMatrix& d, const NeighborhoodTable& h,
                     const std::vector<std::size_t>& assignment,
                     const std::vector<std::size_t>& prototypes) {
  double e = 0.0;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    for (std::size_t j = 0; j < prototypes.size(); ++j)
      e += h(assignment[i], j) * d(i, prototypes[j]);
  return e;
}

/// Straightforward batch DSOM: plain argmin affectation with the radius
/// tie-break, grouped-score exhaustive representation.
inline std::vector<std::vector<std::size_t>> run_prototypes(
    const DissimilarityMatrix& d, const std::vector<std::vector<int>>& delta,
    const NeighborhoodTable& h, std::vector<std::size_t> prototypes,
    std::size_t iterations, std::vector<std::vector<std::size_t>>* assignments) {
  const std::size_t n = d.size();
  const std::size_t m = prototypes.size();
  int diameter = 0;
  for (const auto& row : delta)
    for (int v : row) diameter = std::max(diameter, v);
  std::vector<std::vector<std::size_t>> history;
  for (std::size_t it = 0; it < iterations; ++it) {
    std::vector<std::size_t> assignment(n);
    for (std::size_t i = 0; i < n; ++i) {
      double lo = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < m; ++j) lo = std::min(lo, d(i, prototypes[j]));
      std::vector<std::size_t> tied;
      for (std::size_t j = 0; j < m; ++j)
        if (d(i, prototypes[j]) == lo) tied.push_back(j);
      for (int r = 1; r <= diameter && tied.size() > 1; ++r) {
        std::vector<double> sums;
        for (std::size_t j : tied) {
          double s = 0.0;
          for (std::size_t v = 0; v < m; ++v)
            if (delta[v][j] <= r) s += d(i, prototypes[v]);
          sums.push_back(s);
        }
        const double best = *std::min_element(sums.begin(), sums.end());
        std::vector<std::size_t> keep;
        for (std::size_t t = 0; t < tied.size(); ++t)
          if (sums[t] == best) keep.push_back(tied[t]);
        tied = keep;
      }
      assignment[i] = tied.front();
    }
    for (std::size_t j = 0; j < m; ++j) {
      std::size_t best_k = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n; ++k) {
        const double s = grouped_score(d, h, assignment, m, j, k);
        if (s < best) {
          best = s;
          best_k = k;
        }
      }
      prototypes[j] = best_k;
    }
    if (assignments) assignments->push_back(assignment);
    history.push_back(prototypes);
  }
  return history;
}

/// A random symmetric matrix with zero diagonal, entries drawn from a small
/// set of values when `coarse` (to force ties) or uniform otherwise.
inline DissimilarityMatrix random_matrix(std::size_t n, std::mt19937_64& rng,
                                         bool coarse) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> small(0, 4);
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double x = coarse ? 0.25 * small(rng) : unit(rng);
      v[i * n + j] = x;
      v[j * n + i] = x;
    }
  return DissimilarityMatrix::from_values(n, std::move(v));
}

/// The three-point, two-node instance used throughout the unit tests:
/// collinear points 0, 1, 2 so that d(0,1) = d(1,2) = 1 and d(0,2) = 4.
inline DissimilarityMatrix worked_matrix() {
  const std::vector<Point> pts{{0, 0}, {1, 0}, {2, 0}};
  return sq_euclidean_matrix(pts);
}

}  // namespace dsom::oracle
