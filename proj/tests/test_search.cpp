#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "trustdyn/search.hpp"

using namespace trustdyn;

namespace {

Box square(double lo, double hi, std::size_t dim) { return {std::vector<double>(dim, lo), std::vector<double>(dim, hi)}; }

}  // namespace

TEST(NelderMead, FindsMaximumOfQuadratic) {
  const Objective f = [](std::span<const double> x) {
    return -((x[0] - 1.0) * (x[0] - 1.0) + 3.0 * (x[1] + 2.0) * (x[1] + 2.0));
  };
  const std::vector<double> start{0.0, 0.0};
  const auto r = nelder_mead_maximize(f, start, square(-10, 10, 2), SearchConfig{});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-5);
  EXPECT_NEAR(r.x[1], -2.0, 1e-5);
}

TEST(NelderMead, Rosenbrock) {
  const Objective f = [](std::span<const double> x) {
    return -(100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2));
  };
  SearchConfig cfg;
  cfg.max_evaluations = 5000;
  const std::vector<double> start{-1.2, 1.0};
  const auto r = nelder_mead_maximize(f, start, square(-5, 5, 2), cfg);
  EXPECT_NEAR(r.x[0], 1.0, 1e-4);
  EXPECT_NEAR(r.x[1], 1.0, 1e-4);
}

TEST(NelderMead, StaysInsideBox) {
  // Unconstrained maximum at (5, 5) lies outside the box.
  const Objective f = [](std::span<const double> x) { return -(std::pow(x[0] - 5, 2) + std::pow(x[1] - 5, 2)); };
  const std::vector<double> start{0.0, 0.0};
  const auto r = nelder_mead_maximize(f, start, square(-1, 1, 2), SearchConfig{});
  EXPECT_NEAR(r.x[0], 1.0, 1e-6);
  EXPECT_NEAR(r.x[1], 1.0, 1e-6);
}

TEST(NelderMead, RespectsEvaluationBudget) {
  const Objective f = [](std::span<const double> x) { return std::sin(50 * x[0]) + std::cos(37 * x[1]); };
  SearchConfig cfg;
  cfg.max_evaluations = 40;
  const std::vector<double> start{0.1, 0.2};
  const auto r = nelder_mead_maximize(f, start, square(-3, 3, 2), cfg);
  // One iteration may overshoot by at most n + 1 evaluations (a shrink).
  EXPECT_LE(r.evaluations, 40 + 3);
}

TEST(NelderMead, NonFiniteValuesAreTreatedAsWorst) {
  const Objective f = [](std::span<const double> x) { return x[0] < 0 ? NAN : -std::pow(x[0] - 0.5, 2); };
  const std::vector<double> start{2.0};
  const auto r = nelder_mead_maximize(f, start, square(-1, 3, 1), SearchConfig{});
  EXPECT_NEAR(r.x[0], 0.5, 1e-5);
}

TEST(FloorGrid, EnumeratesEveryPointOnce) {
  const auto g = floor_grid(square(0, 7, 3), 8);
  ASSERT_EQ(g.size(), 512u);
  std::set<std::vector<double>> unique(g.begin(), g.end());
  EXPECT_EQ(unique.size(), 512u);
  EXPECT_EQ(g.front(), (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(g.back(), (std::vector<double>{7, 7, 7}));
  EXPECT_TRUE(floor_grid(square(0, 1, 2), 0).empty());
}

TEST(Halton, DeterministicAndInBox) {
  const Box b = square(-2, 3, 4);
  const auto a = halton_points(b, 14, 99);
  EXPECT_EQ(a, halton_points(b, 14, 99));
  EXPECT_NE(a, halton_points(b, 14, 100));
  for (const auto& p : a)
    for (double v : p) {
      EXPECT_GE(v, -2.0);
      EXPECT_LE(v, 3.0);
    }
}

TEST(MultiStart, NeverWorseThanFloorGrid) {
  // Multimodal surface where a single local search can stall.
  const Objective f = [](std::span<const double> x) {
    return std::sin(3 * x[0]) * std::cos(2 * x[1]) - 0.05 * (x[0] * x[0] + x[1] * x[1]);
  };
  SearchConfig cfg;
  cfg.restarts = 3;
  const Box b = square(-4, 4, 2);
  const auto r = multi_start_maximize(f, b, {}, cfg);
  double grid_best = -INFINITY;
  for (const auto& p : floor_grid(b, cfg.grid_points)) grid_best = std::max(grid_best, f(p));
  EXPECT_GE(r.value, grid_best);
  EXPECT_EQ(r.grid_best, grid_best);
  EXPECT_EQ(r.restarts_used, 4);  // 3 standard starts + the polish from the best grid point
}

TEST(MultiStart, AnchorsAreUsedFirst) {
  int calls = 0;
  std::vector<double> first;
  const Objective f = [&](std::span<const double> x) {
    if (calls++ == 0) first.assign(x.begin(), x.end());
    return -x[0] * x[0];
  };
  SearchConfig cfg;
  cfg.grid_points = 0;
  const std::vector<std::vector<double>> anchors{{0.75}};
  multi_start_maximize(f, square(-1, 1, 1), anchors, cfg);
  EXPECT_EQ(first, (std::vector<double>{0.75}));
}

TEST(MultiStart, ThrowsWhenNothingIsFinite) {
  const Objective f = [](std::span<const double>) { return NAN; };
  SearchConfig cfg;
  cfg.restarts = 2;
  cfg.grid_points = 2;
  EXPECT_THROW(multi_start_maximize(f, square(0, 1, 2), {}, cfg), std::runtime_error);
}
