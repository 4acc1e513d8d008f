#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "trustdyn/clustering.hpp"

using namespace trustdyn;

namespace {

// Gaussian blobs around the given centres.
std::vector<Point> blobs(const std::vector<Point>& centres, int per, double sd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, sd);
  std::vector<Point> out;
  for (const Point& c : centres)
    for (int i = 0; i < per; ++i) out.push_back({c[0] + n(rng), c[1] + n(rng)});
  return out;
}

double sse(std::span<const Point> pts, const std::vector<int>& assign, int k) {
  double total = 0.0;
  for (int c = 0; c < k; ++c) {
    double mx = 0, my = 0;
    int cnt = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (assign[i] == c) {
        mx += pts[i][0];
        my += pts[i][1];
        ++cnt;
      }
    if (cnt == 0) continue;
    mx /= cnt;
    my /= cnt;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (assign[i] == c) total += std::pow(pts[i][0] - mx, 2) + std::pow(pts[i][1] - my, 2);
  }
  return total;
}

}  // namespace

TEST(Features, MatchDefinition) {
  AgentRecord r{"a", std::vector<Outcome>(4, Outcome::success), {{1, 0.5}, {2, 0.25}, {3, 0.0}, {4, 1.0}}};
  const FeatureVector f = compute_features(r, 0.3);
  EXPECT_EQ(f.rmse, 0.3);
  EXPECT_NEAR(f.avg_log_trust, (std::log(0.5) + std::log(0.25) + std::log(1e-3) + 0.0) / 4.0, 1e-15);
  r.reports.erase(2);
  EXPECT_THROW(compute_features(r, 0.3), std::invalid_argument);
}

TEST(ZScore, UnitPopulationMoments) {
  const std::vector<FeatureVector> f{{0.1, -1.0}, {0.2, -2.0}, {0.6, -0.5}, {0.3, -3.0}};
  const auto z = zscore_normalize(f);
  double m0 = 0, m1 = 0, v0 = 0, v1 = 0;
  for (const auto& x : z.normalized) {
    m0 += x.rmse / 4;
    m1 += x.avg_log_trust / 4;
  }
  for (const auto& x : z.normalized) {
    v0 += x.rmse * x.rmse / 4;
    v1 += x.avg_log_trust * x.avg_log_trust / 4;
  }
  EXPECT_NEAR(m0, 0.0, 1e-12);
  EXPECT_NEAR(m1, 0.0, 1e-12);
  EXPECT_NEAR(v0, 1.0, 1e-12);
  EXPECT_NEAR(v1, 1.0, 1e-12);
  EXPECT_NEAR(z.mean.rmse, 0.3, 1e-15);
}

TEST(ZScore, ConstantColumnMapsToZero) {
  const std::vector<FeatureVector> f{{0.2, -1.0}, {0.2, -2.0}, {0.2, -0.5}};
  const auto z = zscore_normalize(f);
  EXPECT_EQ(z.sd.rmse, kSdFloor);
  for (const auto& x : z.normalized) EXPECT_EQ(x.rmse, 0.0);
  EXPECT_THROW(zscore_normalize(std::span(f).first(1)), std::invalid_argument);
}

TEST(KMeans, RecoversSeparatedBlobs) {
  const auto pts = blobs({{0, 0}, {10, 0}, {0, 10}}, 20, 0.5, 1);
  const auto r = kmeans(pts, 3, 7);
  for (int b = 0; b < 3; ++b)
    for (int i = 1; i < 20; ++i) EXPECT_EQ(r.assignments[b * 20 + i], r.assignments[b * 20]);
  EXPECT_NE(r.assignments[0], r.assignments[20]);
  EXPECT_NE(r.assignments[0], r.assignments[40]);
  EXPECT_NE(r.assignments[20], r.assignments[40]);
  EXPECT_NEAR(r.within_cluster_variance, sse(pts, r.assignments, 3), 1e-9);
}

TEST(KMeans, ObjectiveNeverIncreases) {
  const auto pts = blobs({{0, 0}, {2, 1}, {1, 3}, {4, 4}}, 15, 1.0, 3);
  const auto r = kmeans(pts, 4, 11);
  for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i], r.history[i - 1] + 1e-12);
}

TEST(KMeans, MatchesExhaustiveOptimumOnSmallInput) {
  const auto pts = blobs({{0, 0}, {3, 3}}, 5, 1.5, 9);
  double best = INFINITY;
  std::vector<int> assign(pts.size());
  for (unsigned mask = 1; mask + 1 < (1u << pts.size()); ++mask) {
    for (std::size_t i = 0; i < pts.size(); ++i) assign[i] = (mask >> i) & 1u;
    best = std::min(best, sse(pts, assign, 2));
  }
  EXPECT_NEAR(kmeans(pts, 2, 1).within_cluster_variance, best, 1e-9);
}

TEST(KMeans, EdgeCases) {
  const auto pts = blobs({{0, 0}}, 5, 1.0, 2);
  EXPECT_NEAR(kmeans(pts, 5, 1).within_cluster_variance, 0.0, 1e-15);
  EXPECT_THROW(kmeans(pts, 6, 1), std::invalid_argument);
  EXPECT_THROW(kmeans(pts, 0, 1), std::invalid_argument);
  // Duplicate points never leave a cluster empty.
  const std::vector<Point> dup(6, Point{1.0, 1.0});
  const auto r = kmeans(dup, 3, 1);
  EXPECT_EQ(r.centroids.size(), 3u);
  EXPECT_EQ(r.within_cluster_variance, 0.0);
}

TEST(KMeans, DeterministicForSeed) {
  const auto pts = blobs({{0, 0}, {2, 1}, {1, 3}}, 10, 1.0, 5);
  EXPECT_EQ(kmeans(pts, 3, 42).assignments, kmeans(pts, 3, 42).assignments);
}

TEST(Elbow, PicksTheTrueClusterCount) {
  const auto pts = blobs({{0, 0}, {10, 0}, {5, 9}}, 15, 0.7, 4);
  const auto e = elbow_select(pts, 1, 6, 3);
  EXPECT_EQ(e.selected_k, 3);
  EXPECT_FALSE(e.no_curvature);
  EXPECT_FALSE(e.low_confidence);
  ASSERT_EQ(e.curve.size(), 6u);
  // Oracle: argmax of V(k-1) - 2V(k) + V(k+1) over interior k.
  int want = 0;
  double best = -INFINITY;
  for (std::size_t i = 1; i + 1 < e.curve.size(); ++i) {
    const double d2 = e.curve[i - 1].second - 2 * e.curve[i].second + e.curve[i + 1].second;
    if (d2 > best) {
      best = d2;
      want = e.curve[i].first;
    }
  }
  EXPECT_EQ(e.selected_k, want);
}

TEST(Elbow, ShortRangeFallsBackToArgmin) {
  const auto pts = blobs({{0, 0}, {10, 0}}, 10, 0.5, 6);
  const auto e = elbow_select(pts, 2, 3, 1);
  EXPECT_TRUE(e.no_curvature);
  EXPECT_EQ(e.selected_k, 3);
  EXPECT_THROW(elbow_select(pts, 3, 2, 1), std::invalid_argument);
}

TEST(Elbow, FlagsStructurelessData) {
  // Points on a uniform grid have no preferred cluster count.
  std::vector<Point> pts;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) pts.push_back({double(i), double(j)});
  EXPECT_TRUE(elbow_select(pts, 1, 6, 2).low_confidence);
}

TEST(ClusterMeans, AveragesRawFeatures) {
  const std::vector<FeatureVector> f{{1, -1}, {3, -3}, {10, 0}};
  const std::vector<int> a{0, 0, 1};
  const auto m = cluster_means(f, a, 2);
  EXPECT_EQ(m[0].rmse, 2.0);
  EXPECT_EQ(m[0].avg_log_trust, -2.0);
  EXPECT_EQ(m[1].rmse, 10.0);
}

TEST(LabelArchetypes, AssignsByRule) {
  const std::vector<FeatureVector> c{{0.05, -0.3}, {0.02, -2.8}, {0.2, -0.4}};
  const auto l = label_archetypes(c);
  EXPECT_EQ(l.by_cluster, (std::vector<Archetype>{Archetype::bayesian, Archetype::disbeliever, Archetype::oscillator}));
  EXPECT_FALSE(l.tie);
  EXPECT_THROW(label_archetypes(std::span(c).first(2)), std::invalid_argument);
}

TEST(LabelArchetypes, TieGoesToLowerRmse) {
  const std::vector<FeatureVector> c{{0.3, -2.0}, {0.1, -2.0}, {0.05, -0.2}};
  const auto l = label_archetypes(c);
  EXPECT_TRUE(l.tie);
  EXPECT_EQ(l.by_cluster[1], Archetype::disbeliever);
  EXPECT_EQ(l.by_cluster[0], Archetype::oscillator);
}

TEST(Purity, FractionOfMatchingLabels) {
  const ArchetypeLabels l{{Archetype::bayesian, Archetype::disbeliever, Archetype::oscillator}, false};
  const std::vector<int> a{0, 0, 1, 2, 2};
  const std::vector<Archetype> truth{Archetype::bayesian, Archetype::oscillator, Archetype::disbeliever,
                                     Archetype::oscillator, Archetype::oscillator};
  EXPECT_DOUBLE_EQ(label_purity(a, l, truth), 0.8);
  EXPECT_THROW(label_purity(std::span(a).first(3), l, truth), std::invalid_argument);
}
