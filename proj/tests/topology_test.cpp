#include <gtest/gtest.h>

#include <cmath>

#include "dsom/topology.hpp"
#include "oracles.hpp"

namespace dsom {
namespace {

TEST(BuildGrid, Singleton) {
  const auto g = build_grid(1, 1, Layout::hexagonal);
  EXPECT_EQ(g.size(), 1u);
  EXPECT_EQ(g.delta(0, 0), 0);
  EXPECT_EQ(g.diameter(), 0);
}

TEST(BuildGrid, RectangularPath) {
  const auto g = build_grid(1, 5, Layout::rectangular);
  EXPECT_EQ(g.delta(0, 4), 4);
  EXPECT_EQ(g.diameter(), 4);
}

TEST(BuildGrid, HexTwoByTwo) {
  const auto g = build_grid(2, 2, Layout::hexagonal);
  // Odd-row offset: (0,0) is not adjacent to (1,1); every other pair is.
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      const int expected = a == b ? 0 : ((a == 0 && b == 3) || (a == 3 && b == 0)) ? 2 : 1;
      EXPECT_EQ(g.delta(a, b), expected) << a << "," << b;
    }
}

TEST(BuildGrid, RejectsZeroDimension) {
  EXPECT_THROW(build_grid(0, 3, Layout::hexagonal), InvalidInput);
  EXPECT_THROW(build_grid(3, 0, Layout::rectangular), InvalidInput);
}

TEST(BuildGrid, MatchesFloydWarshallOnAllSmallGrids) {
  for (auto layout : {Layout::hexagonal, Layout::rectangular}) {
    for (std::size_t rows = 1; rows <= 10; ++rows) {
      for (std::size_t cols = 1; rows * cols <= 100 && cols <= 10; ++cols) {
        const auto g = build_grid(rows, cols, layout);
        const auto ref = oracle::grid_distances(rows, cols, layout);
        ASSERT_EQ(g.size(), rows * cols);
        for (std::size_t a = 0; a < g.size(); ++a) {
          for (std::size_t b = 0; b < g.size(); ++b) {
            ASSERT_EQ(g.delta(a, b), ref[a][b])
                << rows << "x" << cols << " " << to_string(layout) << " " << a << "," << b;
          }
          for (std::size_t b : g.neighbors(a)) EXPECT_EQ(g.delta(a, b), 1);
        }
      }
    }
  }
}

TEST(BuildGrid, DistanceOrderStartsAtSelfAndIsSorted) {
  const auto g = build_grid(5, 4, Layout::hexagonal);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const auto order = g.by_distance(j);
    ASSERT_EQ(order.size(), g.size());
    EXPECT_EQ(order[0], j);
    for (std::size_t t = 1; t < order.size(); ++t) {
      const int prev = g.delta(j, order[t - 1]);
      const int cur = g.delta(j, order[t]);
      EXPECT_TRUE(prev < cur || (prev == cur && order[t - 1] < order[t]));
    }
  }
}

TEST(Temperature, Endpoints) {
  const NeighborhoodSchedule s{4.0, 1.0, 3};
  EXPECT_EQ(temperature(s, 0), 4.0);
  EXPECT_DOUBLE_EQ(temperature(s, 2), 1.0);
  EXPECT_DOUBLE_EQ(temperature(s, 1), 2.0);
  const NeighborhoodSchedule one{4.0, 0.5, 1};
  EXPECT_EQ(temperature(one, 0), 0.5);
}

TEST(Temperature, ScheduleValidation) {
  EXPECT_THROW((NeighborhoodSchedule{1.0, 2.0, 10}.validate()), InvalidInput);
  EXPECT_THROW((NeighborhoodSchedule{1.0, 0.0, 10}.validate()), InvalidInput);
  EXPECT_THROW((NeighborhoodSchedule{1.0, 0.5, 0}.validate()), InvalidInput);
  const auto g = build_grid(7, 7, Layout::hexagonal);
  const auto s = default_schedule(g);
  EXPECT_EQ(s.t0, static_cast<double>(g.diameter()));
  EXPECT_EQ(s.tf, 0.3);
  EXPECT_EQ(s.iterations, 100u);
}

TEST(Neighborhood, KernelValues) {
  const auto g = build_grid(1, 4, Layout::rectangular);
  const NeighborhoodSchedule unit{1.0, 1.0, 5};
  EXPECT_EQ(neighborhood(g, unit, 2, 1, 1), 1.0);
  EXPECT_NEAR(neighborhood(g, unit, 2, 0, 1), 0.367879441, 1e-9);
  const NeighborhoodSchedule cold{0.3, 0.3, 5};
  EXPECT_DOUBLE_EQ(neighborhood(g, cold, 0, 0, 3), std::exp(-100.0));
}

TEST(Neighborhood, MonotoneAndSymmetric) {
  const auto g = build_grid(6, 6, Layout::hexagonal);
  const auto s = default_schedule(g, 20);
  for (std::size_t l = 0; l < s.iterations; ++l) {
    const NeighborhoodTable h(g, s, l);
    for (std::size_t j = 0; j < g.size(); ++j)
      for (std::size_t k = 0; k < g.size(); ++k) {
        ASSERT_EQ(h(j, k), h(k, j));
        ASSERT_GT(h(j, k), 0.0);
        ASSERT_LE(h(j, k), 1.0);
        if (l > 0 && g.delta(j, k) > 0) {
          ASSERT_LE(h(j, k), neighborhood(g, s, l - 1, j, k));
        }
        for (std::size_t k2 = 0; k2 < g.size(); ++k2) {
          if (g.delta(j, k2) > g.delta(j, k)) ASSERT_LE(h(j, k2), h(j, k));
        }
      }
  }
}

}  // namespace
}  // namespace dsom
