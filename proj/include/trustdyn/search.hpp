#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace trustdyn {

/// Settings for the derivative-free multi-start search used by every fitter.
struct SearchConfig {
  std::uint64_t seed = 0;
  /// Total Nelder-Mead starts, anchors included.
  int restarts = 16;
  /// Per-start evaluation budget.
  int max_evaluations = 2000;
  /// Simplex diameter (infinity norm, search coordinates) at which a start stops.
  double tolerance = 1e-6;
  /// Points per axis of the coarse floor grid; 0 disables it.
  int grid_points = 8;
  /// Edge length of the initial simplex in search coordinates.
  double initial_step = 0.5;
};

/// Axis-aligned box in search coordinates.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dim() const { return lower.size(); }
  std::vector<double> project(std::span<const double> x) const;
};

using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Maximize `f` from `start` with the Nelder-Mead simplex method. Vertices are
/// projected into `box`; non-finite objective values count as -infinity.
NelderMeadResult nelder_mead_maximize(const Objective& f, std::span<const double> start, const Box& box,
                                      const SearchConfig& config);

struct SearchResult {
  std::vector<double> x;
  double value = 0.0;
  int restarts_used = 0;
  bool converged = false;
  /// Best value over the floor grid (-infinity when the grid is disabled).
  double grid_best = 0.0;
};

/// Multi-start maximization.
///
/// Starts are, in order: `anchors`, then scrambled Halton points in the box up
/// to `config.restarts` starts in total, then one extra start from the best
/// floor-grid point. The floor grid is evaluated in full when enabled and the
/// result is never worse than its best point. Ties keep the first found.
/// Throws std::runtime_error when every evaluated point is non-finite.
SearchResult multi_start_maximize(const Objective& f, const Box& box, std::span<const std::vector<double>> anchors,
                                  const SearchConfig& config);

/// Points of the floor grid: `points_per_axis` evenly spaced values per axis,
/// endpoints included, in lexicographic order.
std::vector<std::vector<double>> floor_grid(const Box& box, int points_per_axis);

/// `count` scrambled Halton points in the box, deterministic in `seed`.
std::vector<std::vector<double>> halton_points(const Box& box, int count, std::uint64_t seed);

}  // namespace trustdyn
