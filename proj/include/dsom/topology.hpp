#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dsom/error.hpp"

namespace dsom {

enum class Layout { hexagonal, rectangular };

inline std::string_view to_string(Layout layout) {
  return layout == Layout::hexagonal ? "hex" : "rect";
}

inline Layout parse_layout(std::string_view s) {
  if (s == "hex" || s == "hexagonal") return Layout::hexagonal;
  if (s == "rect" || s == "rectangular") return Layout::rectangular;
  throw InvalidInput("unknown layout '" + std::string(s) + "'");
}

/// Prior structure of the map: a rows x cols grid with graph distances
/// (edge counts) between every pair of nodes. Nodes are numbered row-major.
class MapGraph {
 public:
  std::size_t size() const noexcept { return m_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Layout layout() const noexcept { return layout_; }

  std::span<const std::size_t> neighbors(std::size_t j) const noexcept {
    return adjacency_[j];
  }

  int delta(std::size_t j, std::size_t k) const noexcept {
    return delta_[j * m_ + k];
  }

  int diameter() const noexcept { return diameter_; }

  /// All nodes sorted by ascending distance from `j`, ties by node index.
  /// The first entry is always `j` itself.
  std::span<const std::size_t> by_distance(std::size_t j) const noexcept {
    return {order_.data() + j * m_, m_};
  }

  friend MapGraph build_grid(std::size_t rows, std::size_t cols, Layout layout);

 private:
  std::size_t m_ = 0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Layout layout_ = Layout::hexagonal;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<int> delta_;
  std::vector<std::size_t> order_;
  int diameter_ = 0;
};

/// Hexagonal grids use the odd-row offset convention: (r, c) touches
/// (r, c +- 1), (r +- 1, c), and (r +- 1, c - 1) on even rows or
/// (r +- 1, c + 1) on odd rows. Rectangular grids use 4-neighbourhoods.
inline MapGraph build_grid(std::size_t rows, std::size_t cols, Layout layout) {
  if (rows == 0 || cols == 0) throw InvalidInput("grid dimensions must be positive");
  MapGraph g;
  g.rows_ = rows;
  g.cols_ = cols;
  g.layout_ = layout;
  g.m_ = rows * cols;
  const std::size_t m = g.m_;
  g.adjacency_.assign(m, {});

  auto link = [&](std::size_t r, std::size_t c, long dr, long dc) {
    const long nr = static_cast<long>(r) + dr;
    const long nc = static_cast<long>(c) + dc;
    if (nr < 0 || nc < 0 || nr >= static_cast<long>(rows) ||
        nc >= static_cast<long>(cols))
      return;
    g.adjacency_[r * cols + c].push_back(static_cast<std::size_t>(nr) * cols +
                                         static_cast<std::size_t>(nc));
  };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      link(r, c, 0, -1);
      link(r, c, 0, 1);
      link(r, c, -1, 0);
      link(r, c, 1, 0);
      if (layout == Layout::hexagonal) {
        const long side = (r % 2 == 0) ? -1 : 1;
        link(r, c, -1, side);
        link(r, c, 1, side);
      }
      auto& adj = g.adjacency_[r * cols + c];
      std::sort(adj.begin(), adj.end());
    }
  }

  g.delta_.assign(m * m, -1);
  std::queue<std::size_t> queue;
  for (std::size_t s = 0; s < m; ++s) {
    int* dist = g.delta_.data() + s * m;
    dist[s] = 0;
    queue.push(s);
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop();
      for (std::size_t w : g.adjacency_[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push(w);
        }
      }
    }
  }
  g.diameter_ = *std::max_element(g.delta_.begin(), g.delta_.end());

  g.order_.resize(m * m);
  for (std::size_t j = 0; j < m; ++j) {
    auto first = g.order_.begin() + static_cast<std::ptrdiff_t>(j * m);
    std::iota(first, first + static_cast<std::ptrdiff_t>(m), std::size_t{0});
    std::stable_sort(first, first + static_cast<std::ptrdiff_t>(m),
                     [&](std::size_t a, std::size_t b) {
                       return g.delta(j, a) < g.delta(j, b);
                     });
  }
  return g;
}

/// Exponentially decaying temperature T^l from t0 (l = 0) to tf (l = L-1).
struct NeighborhoodSchedule {
  double t0 = 1.0;
  double tf = 0.3;
  std::size_t iterations = 100;

  void validate() const {
    if (!(tf > 0.0)) throw InvalidInput("final temperature must be positive");
    if (!(t0 >= tf)) throw InvalidInput("initial temperature must be >= final");
    if (iterations == 0) throw InvalidInput("at least one iteration is required");
  }
};

inline constexpr double kDefaultFinalTemperature = 0.3;

/// t0 = graph diameter (at least tf), tf = 0.3.
inline NeighborhoodSchedule default_schedule(const MapGraph& graph,
                                             std::size_t iterations = 100) {
  NeighborhoodSchedule s;
  s.tf = kDefaultFinalTemperature;
  s.t0 = std::max(static_cast<double>(graph.diameter()), s.tf);
  s.iterations = iterations;
  s.validate();
  return s;
}

inline double temperature(const NeighborhoodSchedule& s, std::size_t l) {
  if (s.iterations == 1) return s.tf;
  const double frac =
      static_cast<double>(l) / static_cast<double>(s.iterations - 1);
  return s.t0 * std::pow(s.tf / s.t0, frac);
}

/// Gaussian kernel K(x) = exp(-x^2).
inline double kernel(double x) { return std::exp(-x * x); }

inline double neighborhood(const MapGraph& graph, const NeighborhoodSchedule& s,
                           std::size_t l, std::size_t j, std::size_t k) {
  return kernel(static_cast<double>(graph.delta(j, k)) / temperature(s, l));
}

/// h^l(u, j) for every pair of nodes at one iteration. Symmetric, so row j
/// doubles as the column h^l(., j) read by the representation sums.
class NeighborhoodTable {
 public:
  NeighborhoodTable() = default;

  NeighborhoodTable(const MapGraph& graph, double temp)
      : m_(graph.size()), values_(m_ * m_) {
    for (std::size_t j = 0; j < m_; ++j) {
      for (std::size_t k = 0; k < m_; ++k) {
        values_[j * m_ + k] =
            kernel(static_cast<double>(graph.delta(j, k)) / temp);
      }
    }
  }

  NeighborhoodTable(const MapGraph& graph, const NeighborhoodSchedule& s,
                    std::size_t l)
      : NeighborhoodTable(graph, temperature(s, l)) {}

  std::size_t size() const noexcept { return m_; }

  double operator()(std::size_t u, std::size_t j) const noexcept {
    return values_[u * m_ + j];
  }

  /// h(., j) as a contiguous span.
  std::span<const double> column(std::size_t j) const noexcept {
    return {values_.data() + j * m_, m_};
  }

 private:
  std::size_t m_ = 0;
  std::vector<double> values_;
};

}  // namespace dsom
