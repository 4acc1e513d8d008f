#include "trustdyn/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace trustdyn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_eval(const Objective& f, std::span<const double> x) {
  const double v = f(x);
  return std::isfinite(v) ? v : kNegInf;
}

double simplex_diameter(const std::vector<std::vector<double>>& simplex, std::size_t best) {
  double d = 0.0;
  for (std::size_t i = 0; i < simplex.size(); ++i) {
    if (i == best) continue;
    for (std::size_t j = 0; j < simplex[i].size(); ++j)
      d = std::max(d, std::abs(simplex[i][j] - simplex[best][j]));
  }
  return d;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

double radical_inverse(std::uint64_t index, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

std::vector<double> Box::project(std::span<const double> x) const {
  std::vector<double> out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lower[i], upper[i]);
  return out;
}

NelderMeadResult nelder_mead_maximize(const Objective& f, std::span<const double> start, const Box& box,
                                      const SearchConfig& config) {
  const std::size_t n = box.dim();
  if (start.size() != n) throw std::invalid_argument("nelder_mead_maximize: start has wrong dimension");

  // Standard coefficients; the simplex is stored as minimization of -f.
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;

  NelderMeadResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    return -safe_eval(f, x);
  };

  std::vector<std::vector<double>> simplex;
  simplex.reserve(n + 1);
  simplex.push_back(box.project(start));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v = simplex[0];
    // Step toward the interior when the start sits on the upper bound.
    double step = config.initial_step;
    if (v[i] + step > box.upper[i]) step = -step;
    v[i] += step;
    simplex.push_back(box.project(v));
  }
  std::vector<double> cost(n + 1);
  for (std::size_t i = 0; i <= n; ++i) cost[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);

  for (;;) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cost[a] < cost[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[n - 1];

    if (simplex_diameter(simplex, best) < config.tolerance) {
      res.converged = true;
      break;
    }
    if (res.evaluations >= config.max_evaluations) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    auto along = [&](double coeff, std::vector<double>& out) {
      for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + coeff * (simplex[worst][j] - centroid[j]);
      out = box.project(out);
    };

    along(-kReflect, trial);
    const double fr = eval(trial);
    if (fr < cost[best]) {
      along(-kExpand, trial2);
      const double fe = eval(trial2);
      if (fe < fr) {
        simplex[worst] = trial2;
        cost[worst] = fe;
      } else {
        simplex[worst] = trial;
        cost[worst] = fr;
      }
      continue;
    }
    if (fr < cost[second_worst]) {
      simplex[worst] = trial;
      cost[worst] = fr;
      continue;
    }
    // Contraction: outside if the reflection improved on the worst, else inside.
    const bool outside = fr < cost[worst];
    along(outside ? -kContract : kContract, trial2);
    const double fc = eval(trial2);
    if (fc < (outside ? fr : cost[worst])) {
      simplex[worst] = trial2;
      cost[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[best][j] + kShrink * (simplex[i][j] - simplex[best][j]);
      simplex[i] = box.project(simplex[i]);
      cost[i] = eval(simplex[i]);
    }
  }

  const auto best_it = std::min_element(cost.begin(), cost.end());
  const std::size_t best = static_cast<std::size_t>(best_it - cost.begin());
  res.x = simplex[best];
  res.value = -cost[best];
  return res;
}

std::vector<std::vector<double>> floor_grid(const Box& box, int points_per_axis) {
  std::vector<std::vector<double>> out;
  if (points_per_axis <= 0) return out;
  const std::size_t n = box.dim();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= static_cast<std::size_t>(points_per_axis);
  out.reserve(total);
  std::vector<int> idx(n, 0);
  auto coord = [&](std::size_t axis, int k) {
    if (points_per_axis == 1) return 0.5 * (box.lower[axis] + box.upper[axis]);
    return box.lower[axis] + (box.upper[axis] - box.lower[axis]) * k / (points_per_axis - 1);
  };
  for (std::size_t c = 0; c < total; ++c) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = coord(i, idx[i]);
    out.push_back(std::move(p));
    // Last axis varies fastest.
    for (std::size_t i = n; i-- > 0;) {
      if (++idx[i] < points_per_axis) break;
      idx[i] = 0;
    }
  }
  return out;
}

std::vector<std::vector<double>> halton_points(const Box& box, int count, std::uint64_t seed) {
  const std::size_t n = box.dim();
  if (n > std::size(kPrimes)) throw std::invalid_argument("halton_points: dimension too large");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> shift(n);
  for (double& s : shift) s = u(rng);
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
      double v = radical_inverse(static_cast<std::uint64_t>(k) + 1, kPrimes[i]) + shift[i];
      v -= std::floor(v);
      p[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * v;
    }
    out.push_back(std::move(p));
  }
  return out;
}

SearchResult multi_start_maximize(const Objective& f, const Box& box, std::span<const std::vector<double>> anchors,
                                  const SearchConfig& config) {
  SearchResult best;
  best.value = kNegInf;
  best.grid_best = kNegInf;
  bool have = false;

  auto consider = [&](const std::vector<double>& x, double value, bool converged) {
    if (!have || value > best.value) {
      best.x = x;
      best.value = value;
      best.converged = converged;
      have = true;
    }
  };

  std::vector<double> grid_best_point;
  for (const auto& p : floor_grid(box, config.grid_points)) {
    const double v = safe_eval(f, p);
    if (v > best.grid_best) {
      best.grid_best = v;
      grid_best_point = p;
    }
  }

  std::vector<std::vector<double>> starts;
  for (const auto& a : anchors) {
    if (static_cast<int>(starts.size()) >= config.restarts) break;
    starts.push_back(box.project(a));
  }
  const int fill = config.restarts - static_cast<int>(starts.size());
  for (auto& p : halton_points(box, fill, config.seed)) starts.push_back(std::move(p));
  if (!grid_best_point.empty()) starts.push_back(grid_best_point);

  for (const auto& s : starts) {
    NelderMeadResult r = nelder_mead_maximize(f, s, box, config);
    ++best.restarts_used;
    if (std::isfinite(r.value)) consider(r.x, r.value, r.converged);
  }
  if (!grid_best_point.empty() && std::isfinite(best.grid_best)) consider(grid_best_point, best.grid_best, false);

  if (!have || !std::isfinite(best.value))
    throw std::runtime_error("multi_start_maximize: objective is non-finite everywhere");
  return best;
}

}  // namespace trustdyn
