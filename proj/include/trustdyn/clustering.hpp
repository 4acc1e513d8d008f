#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "trustdyn/datagen.hpp"
#include "trustdyn/inference.hpp"

namespace trustdyn {

/// Per-agent features for the trust-dynamics typology.
struct FeatureVector {
  double rmse = 0.0;
  /// Mean of log(t_i) over all reports, t_i clamped to >= kTrustEpsilon.
  double avg_log_trust = 0.0;
};

/// Throws std::invalid_argument unless the record is dense.
FeatureVector compute_features(const AgentRecord& record, double rmse);

struct ZScoreResult {
  std::vector<FeatureVector> normalized;
  FeatureVector mean;
  /// Population (1/N) standard deviations, floored at kSdFloor.
  FeatureVector sd;
};

inline constexpr double kSdFloor = 1e-9;

/// Throws std::invalid_argument on fewer than 2 vectors.
ZScoreResult zscore_normalize(std::span<const FeatureVector> features);

using Point = std::vector<double>;

std::vector<Point> to_points(std::span<const FeatureVector> features);

struct ClusterResult {
  int k = 0;
  /// Cluster index per input point.
  std::vector<int> assignments;
  std::vector<Point> centroids;
  /// Sum of squared point-to-centroid distances.
  double within_cluster_variance = 0.0;
  /// Objective after each Lloyd iteration of the winning restart.
  std::vector<double> history;
};

struct KMeansOptions {
  int restarts = 10;
  int max_iterations = 300;
};

/// Lloyd's algorithm from k-means++ seeds; best of `options.restarts` runs.
/// Throws std::invalid_argument if k < 1 or k exceeds the number of points.
ClusterResult kmeans(std::span<const Point> points, int k, std::uint64_t seed, const KMeansOptions& options = {});

struct ElbowResult {
  int selected_k = 0;
  /// (k, within-cluster variance) for every k in the range, ascending in k.
  std::vector<std::pair<int, double>> curve;
  std::map<int, ClusterResult> results;
  /// Fewer than 3 values of k: argmin of the curve was returned instead.
  bool no_curvature = false;
  /// The largest second difference is small relative to the overall drop.
  bool low_confidence = false;
};

/// Elbow threshold: max second difference / (first - last variance).
inline constexpr double kElbowConfidence = 0.25;

/// Run kmeans for every k in [k_min, k_max] and choose the k with the largest
/// discrete second difference of the variance curve.
ElbowResult elbow_select(std::span<const Point> points, int k_min, int k_max, std::uint64_t seed);

/// Mean raw feature vector of each cluster.
std::vector<FeatureVector> cluster_means(std::span<const FeatureVector> features, std::span<const int> assignments,
                                         int k);

struct ArchetypeLabels {
  /// Index i holds the archetype of cluster i.
  std::vector<Archetype> by_cluster;
  /// Two clusters tied on avg_log_trust; the lower-rmse one was labelled disbeliever.
  bool tie = false;
};

/// Disbeliever: lowest avg_log_trust. Oscillator: highest rmse among the rest.
/// Bayesian decision maker: the remaining cluster. Throws unless k == 3.
ArchetypeLabels label_archetypes(std::span<const FeatureVector> centroids);

/// Fraction of agents whose cluster's archetype equals their true archetype.
double label_purity(std::span<const int> assignments, const ArchetypeLabels& labels,
                    std::span<const Archetype> truth);

}  // namespace trustdyn
