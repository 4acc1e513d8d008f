#include "trustdyn/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace trustdyn {

namespace {

double sq_dist(const Point& a, const Point& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

int nearest(const Point& p, const std::vector<Point>& centroids) {
  int best = 0;
  double best_d = sq_dist(p, centroids[0]);
  for (std::size_t c = 1; c < centroids.size(); ++c) {
    const double d = sq_dist(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

double objective(std::span<const Point> points, const std::vector<int>& assign, const std::vector<Point>& centroids) {
  double v = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) v += sq_dist(points[i], centroids[static_cast<std::size_t>(assign[i])]);
  return v;
}

std::vector<Point> kmeans_pp_seeds(std::span<const Point> points, int k, Rng& rng) {
  std::vector<Point> seeds;
  std::uniform_int_distribution<std::size_t> first(0, points.size() - 1);
  seeds.push_back(points[first(rng)]);
  std::vector<double> d2(points.size());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (static_cast<int>(seeds.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      d2[i] = std::numeric_limits<double>::infinity();
      for (const Point& s : seeds) d2[i] = std::min(d2[i], sq_dist(points[i], s));
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double target = u(rng) * total;
      for (pick = 0; pick + 1 < points.size(); ++pick) {
        target -= d2[pick];
        if (target < 0.0 && d2[pick] > 0.0) break;
      }
    } else {
      pick = first(rng);
    }
    seeds.push_back(points[pick]);
  }
  return seeds;
}

ClusterResult lloyd(std::span<const Point> points, std::vector<Point> centroids, int max_iterations) {
  const std::size_t n = points.size();
  const std::size_t dim = points[0].size();
  const int k = static_cast<int>(centroids.size());
  ClusterResult r;
  r.k = k;
  r.assignments.assign(n, -1);

  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const int c = nearest(points[i], centroids);
      if (c != r.assignments[i]) {
        r.assignments[i] = c;
        changed = true;
      }
    }
    // An empty cluster takes the point farthest from its centroid.
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int a : r.assignments) ++counts[static_cast<std::size_t>(a)];
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[static_cast<std::size_t>(r.assignments[i])] <= 1) continue;
        const double d = sq_dist(points[i], centroids[static_cast<std::size_t>(r.assignments[i])]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      --counts[static_cast<std::size_t>(r.assignments[far])];
      r.assignments[far] = c;
      ++counts[static_cast<std::size_t>(c)];
      changed = true;
    }
    for (auto& c : centroids) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < dim; ++j) centroids[static_cast<std::size_t>(r.assignments[i])][j] += points[i][j];
    for (int c = 0; c < k; ++c)
      for (double& v : centroids[static_cast<std::size_t>(c)]) v /= counts[static_cast<std::size_t>(c)];

    r.history.push_back(objective(points, r.assignments, centroids));
    if (!changed && iter > 0) break;
  }
  r.centroids = std::move(centroids);
  r.within_cluster_variance = r.history.back();
  return r;
}

}  // namespace

FeatureVector compute_features(const AgentRecord& record, double rmse) {
  if (!record.dense()) throw std::invalid_argument("compute_features: record must carry a report at every trial");
  double sum = 0.0;
  for (const auto& [_, t] : record.reports) sum += std::log(std::max(t, kTrustEpsilon));
  return {rmse, sum / static_cast<double>(record.reports.size())};
}

ZScoreResult zscore_normalize(std::span<const FeatureVector> features) {
  if (features.size() < 2) throw std::invalid_argument("zscore_normalize: need at least 2 feature vectors");
  const double n = static_cast<double>(features.size());
  ZScoreResult out;
  for (const FeatureVector& f : features) {
    out.mean.rmse += f.rmse / n;
    out.mean.avg_log_trust += f.avg_log_trust / n;
  }
  double ss_r = 0.0, ss_l = 0.0;
  for (const FeatureVector& f : features) {
    ss_r += (f.rmse - out.mean.rmse) * (f.rmse - out.mean.rmse);
    ss_l += (f.avg_log_trust - out.mean.avg_log_trust) * (f.avg_log_trust - out.mean.avg_log_trust);
  }
  out.sd = {std::max(std::sqrt(ss_r / n), kSdFloor), std::max(std::sqrt(ss_l / n), kSdFloor)};
  out.normalized.reserve(features.size());
  for (const FeatureVector& f : features)
    out.normalized.push_back(
        {(f.rmse - out.mean.rmse) / out.sd.rmse, (f.avg_log_trust - out.mean.avg_log_trust) / out.sd.avg_log_trust});
  return out;
}

std::vector<Point> to_points(std::span<const FeatureVector> features) {
  std::vector<Point> pts;
  pts.reserve(features.size());
  for (const FeatureVector& f : features) pts.push_back({f.rmse, f.avg_log_trust});
  return pts;
}

ClusterResult kmeans(std::span<const Point> points, int k, std::uint64_t seed, const KMeansOptions& options) {
  if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
  if (static_cast<std::size_t>(k) > points.size()) throw std::invalid_argument("kmeans: k exceeds the number of points");
  Rng rng(seed);
  ClusterResult best;
  bool have = false;
  for (int r = 0; r < std::max(options.restarts, 1); ++r) {
    ClusterResult res = lloyd(points, kmeans_pp_seeds(points, k, rng), options.max_iterations);
    if (!have || res.within_cluster_variance < best.within_cluster_variance) {
      best = std::move(res);
      have = true;
    }
  }
  return best;
}

ElbowResult elbow_select(std::span<const Point> points, int k_min, int k_max, std::uint64_t seed) {
  if (k_min < 1 || k_max < k_min) throw std::invalid_argument("elbow_select: empty k range");
  if (static_cast<std::size_t>(k_max) > points.size())
    throw std::invalid_argument("elbow_select: k range exceeds the number of points");
  ElbowResult out;
  for (int k = k_min; k <= k_max; ++k) {
    ClusterResult r = kmeans(points, k, seed);
    out.curve.emplace_back(k, r.within_cluster_variance);
    out.results.emplace(k, std::move(r));
  }
  if (out.curve.size() < 3) {
    out.no_curvature = true;
    out.low_confidence = true;
    const auto it = std::min_element(out.curve.begin(), out.curve.end(),
                                     [](const auto& a, const auto& b) { return a.second < b.second; });
    out.selected_k = it->first;
    return out;
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < out.curve.size(); ++i) {
    const double d2 = out.curve[i - 1].second - 2.0 * out.curve[i].second + out.curve[i + 1].second;
    if (d2 > best) {
      best = d2;
      out.selected_k = out.curve[i].first;
    }
  }
  const double drop = out.curve.front().second - out.curve.back().second;
  out.low_confidence = !(drop > 0.0) || best < kElbowConfidence * drop;
  return out;
}

std::vector<FeatureVector> cluster_means(std::span<const FeatureVector> features, std::span<const int> assignments,
                                         int k) {
  if (features.size() != assignments.size()) throw std::invalid_argument("cluster_means: size mismatch");
  std::vector<FeatureVector> out(static_cast<std::size_t>(k));
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto c = static_cast<std::size_t>(assignments[i]);
    out[c].rmse += features[i].rmse;
    out[c].avg_log_trust += features[i].avg_log_trust;
    ++counts[c];
  }
  for (std::size_t c = 0; c < out.size(); ++c) {
    if (counts[c] == 0) continue;
    out[c].rmse /= counts[c];
    out[c].avg_log_trust /= counts[c];
  }
  return out;
}

ArchetypeLabels label_archetypes(std::span<const FeatureVector> centroids) {
  if (centroids.size() != 3) throw std::invalid_argument("label_archetypes: defined only for k = 3");
  ArchetypeLabels out;
  out.by_cluster.assign(3, Archetype::bayesian);

  std::size_t disb = 0;
  for (std::size_t c = 1; c < 3; ++c) {
    const auto& cur = centroids[c];
    const auto& best = centroids[disb];
    if (cur.avg_log_trust < best.avg_log_trust ||
        (cur.avg_log_trust == best.avg_log_trust && cur.rmse < best.rmse))
      disb = c;
  }
  for (std::size_t c = 0; c < 3; ++c)
    if (c != disb && centroids[c].avg_log_trust == centroids[disb].avg_log_trust) out.tie = true;
  out.by_cluster[disb] = Archetype::disbeliever;

  std::size_t osc = 3;
  for (std::size_t c = 0; c < 3; ++c) {
    if (c == disb) continue;
    if (osc == 3 || centroids[c].rmse > centroids[osc].rmse) osc = c;
  }
  out.by_cluster[osc] = Archetype::oscillator;
  return out;
}

double label_purity(std::span<const int> assignments, const ArchetypeLabels& labels,
                    std::span<const Archetype> truth) {
  if (assignments.size() != truth.size() || truth.empty()) throw std::invalid_argument("label_purity: size mismatch");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (labels.by_cluster.at(static_cast<std::size_t>(assignments[i])) == truth[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace trustdyn
