#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "avdiar/pmedian.hpp"
#include "oracles.hpp"

using namespace avdiar;

namespace {

DistanceMatrix from_points_1d(const std::vector<double>& pts) {
  DistanceMatrix d;
  d.n = static_cast<int>(pts.size());
  d.d.assign(pts.size() * pts.size(), 0.0);
  for (int i = 0; i < d.n; ++i)
    for (int j = 0; j < d.n; ++j) d.at(i, j) = std::abs(pts[i] - pts[j]);
  return d;
}

DistanceMatrix random_matrix(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> dist(0.0, 10.0);
  DistanceMatrix d;
  d.n = n;
  d.d.assign(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = dist(rng);
      d.at(i, j) = v;
      d.at(j, i) = v;
    }
  }
  return d;
}

FeatureMatrix euclidean_features(std::vector<int> ids,
                                 std::vector<std::vector<double>> rows) {
  FeatureMatrix f;
  f.metric = Metric::euclidean;
  f.dim = rows.empty() ? 0 : static_cast<int>(rows[0].size());
  f.utterance_ids = std::move(ids);
  f.rows = std::move(rows);
  return f;
}

}  // namespace

TEST_CASE("two flat pairs on a line resolve to the lexicographic optimum") {
  const DistanceMatrix d = from_points_1d({0, 1, 10, 11});
  const PMedianSolution sol = pmedian_solve(d, 2);
  // Four center pairs tie at objective 2; the smallest pair of indexes wins.
  CHECK(sol.centers == std::vector<int>{0, 2});
  CHECK(sol.objective == 2.0);
  CHECK(sol.assignment == std::vector<int>{0, 0, 1, 1});
}

TEST_CASE("choosing every point as a center zeroes the objective") {
  const DistanceMatrix d = from_points_1d({4, 9});
  const PMedianSolution sol = pmedian_solve(d, 2);
  CHECK(sol.centers == std::vector<int>{0, 1});
  CHECK(sol.objective == 0.0);
}

TEST_CASE("a single center is the 1-median") {
  const DistanceMatrix d = from_points_1d({0, 1, 5});
  const PMedianSolution sol = pmedian_solve(d, 1);
  CHECK(sol.centers == std::vector<int>{1});  // sums are 6, 5, 9
  CHECK(sol.objective == 5.0);
  CHECK(sol.assignment == std::vector<int>{0, 0, 0});
}

TEST_CASE("nearest-center ties go to the lower center index") {
  // Four center sets reach objective 6; {0, 2} is the lexicographically
  // smallest, and under it point 1 sits 5 from either center.
  const DistanceMatrix d = from_points_1d({0, 5, 10, 11});
  const PMedianSolution sol = pmedian_solve(d, 2);
  CHECK(sol.centers == std::vector<int>{0, 2});
  CHECK(sol.objective == 6.0);
  CHECK(sol.assignment == std::vector<int>{0, 0, 1, 1});
}

TEST_CASE("invalid p and oversized instances are rejected") {
  const DistanceMatrix d = from_points_1d({0, 1, 2});
  CHECK_THROWS_AS(pmedian_solve(d, 0), InvalidP);
  CHECK_THROWS_AS(pmedian_solve(d, 4), InvalidP);

  DistanceMatrix big;
  big.n = 65;
  big.d.assign(65u * 65u, 0.0);
  CHECK_THROWS_AS(pmedian_solve(big, 2), SizeGuardExceeded);
  DistanceMatrix medium;
  medium.n = 25;
  medium.d.assign(25u * 25u, 0.0);
  CHECK_THROWS_AS(pmedian_solve(medium, 3), SizeGuardExceeded);
  CHECK_NOTHROW(pmedian_solve(medium, 2));
}

TEST_CASE("solver agrees with the exhaustive feasible-space oracle") {
  std::mt19937 rng(7011);
  std::uniform_int_distribution<int> size(1, 10);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = size(rng);
    const DistanceMatrix d = random_matrix(rng, n);
    for (int p = 1; p <= std::min(3, n); ++p) {
      CAPTURE(trial, n, p);
      CHECK(pmedian_solve(d, p).objective == avdiar::testing::oracle_pmedian(d, p));
    }
  }
}

TEST_CASE("solution is invariant under uniform scaling of distances") {
  std::mt19937 rng(4242);
  const DistanceMatrix d = random_matrix(rng, 8);
  DistanceMatrix scaled = d;
  for (double& v : scaled.d) v *= 3.75;  // exactly representable factor
  const PMedianSolution a = pmedian_solve(d, 2);
  const PMedianSolution b = pmedian_solve(scaled, 2);
  CHECK(a.centers == b.centers);
  CHECK(a.assignment == b.assignment);
  CHECK(b.objective == Catch::Approx(a.objective * 3.75).epsilon(1e-12));
}

TEST_CASE("returned assignment is the nearest-center assignment") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const DistanceMatrix d = random_matrix(rng, 9);
    const PMedianSolution sol = pmedian_solve(d, 3);
    double recomputed = 0;
    for (int i = 0; i < d.n; ++i) {
      double nearest = d.at(i, sol.centers[0]);
      for (int c : sol.centers) nearest = std::min(nearest, d.at(i, c));
      CHECK(d.at(i, sol.centers[static_cast<size_t>(sol.assignment[i])]) == nearest);
      recomputed += d.at(i, sol.centers[static_cast<size_t>(sol.assignment[i])]);
    }
    CHECK(recomputed == Catch::Approx(sol.objective).epsilon(1e-12));
  }
}

TEST_CASE("medoid minimizes the summed distance, ties to the lowest index") {
  const DistanceMatrix d = from_points_1d({0, 1, 5});
  CHECK(medoid({0, 1, 2}, d) == 1);
  CHECK(medoid({2}, d) == 2);
  // Two symmetric members tie; the lower index wins even when listed last.
  const DistanceMatrix pair = from_points_1d({3, 4});
  CHECK(medoid({1, 0}, pair) == 0);
  CHECK_THROWS_AS(medoid({}, d), EmptyCluster);
}

TEST_CASE("medoid equals a direct argmin recomputation") {
  std::mt19937 rng(5150);
  std::uniform_int_distribution<int> size(1, 9);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = size(rng);
    const DistanceMatrix d = random_matrix(rng, n);
    std::vector<int> members(n);
    for (int i = 0; i < n; ++i) members[i] = i;
    std::shuffle(members.begin(), members.end(), rng);

    int expect = -1;
    double expect_sum = std::numeric_limits<double>::infinity();
    for (int m = 0; m < n; ++m) {
      double sum = 0;
      for (int o = 0; o < n; ++o) sum += d.at(m, o);
      if (sum < expect_sum) {
        expect_sum = sum;
        expect = m;
      }
    }
    CAPTURE(trial, n);
    CHECK(medoid(members, d) == expect);
  }
}

TEST_CASE("a one-utterance scene clusters to a singleton") {
  const FeatureMatrix f = euclidean_features({42}, {{1.0, 2.0}});
  const Partition part = cluster_scene(f, 2);
  REQUIRE(part.clusters.size() == 1);
  CHECK(part.clusters[0] == std::vector<int>{42});
  CHECK(part.centers == std::vector<int>{42});
}

TEST_CASE("an empty scene clusters to an empty partition") {
  const FeatureMatrix f = euclidean_features({}, {});
  const Partition part = cluster_scene(f, 2);
  CHECK(part.clusters.empty());
  CHECK(part.centers.empty());
}

TEST_CASE("alternating spike vectors bipartition by spike label") {
  const FeatureMatrix f = euclidean_features(
      {10, 11, 12, 13}, {{1.5, 0.0}, {0.0, 2.0}, {1.0, 0.0}, {0.0, 1.0}});
  const Partition part = cluster_scene(f, 2);
  REQUIRE(part.clusters.size() == 2);
  CHECK(part.clusters[0] == std::vector<int>{10, 12});
  CHECK(part.clusters[1] == std::vector<int>{11, 13});
}

TEST_CASE("well separated blobs cluster by blob membership") {
  std::mt19937 rng(31337);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<int> ids;
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 10; ++i) {
    const double cx = i % 2 == 0 ? 0.0 : 50.0;
    ids.push_back(i);
    rows.push_back({cx + noise(rng), cx + noise(rng)});
  }
  FeatureMatrix f = euclidean_features(ids, rows);
  f.metric = Metric::normalized_euclidean;
  const Partition part = cluster_scene(f, 2);
  REQUIRE(part.clusters.size() == 2);
  // Cluster order depends on which member becomes the center; compare as sets.
  std::vector<std::vector<int>> got = part.clusters;
  std::sort(got.begin(), got.end());
  CHECK(got == std::vector<std::vector<int>>{{0, 2, 4, 6, 8}, {1, 3, 5, 7, 9}});
}

TEST_CASE("duplicate points may starve a center but never produce empty clusters") {
  const FeatureMatrix f =
      euclidean_features({1, 2, 3}, {{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}});
  const Partition part = cluster_scene(f, 2);
  for (const auto& c : part.clusters) CHECK_FALSE(c.empty());
  CHECK(part.universe() == std::vector<int>{1, 2, 3});
}

TEST_CASE("weighted-sum blend reduces to either modality at the extremes") {
  FeatureMatrix fa = euclidean_features(
      {0, 1, 2, 3}, {{0.0}, {0.1}, {5.0}, {5.1}});
  fa.modality = Modality::audio;
  FeatureMatrix fv = euclidean_features(
      {0, 1, 2, 3}, {{1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {0.0, 1.0}});
  fv.modality = Modality::video;

  const Partition audio_like = cluster_scene_ws(fa, fv, 1.0);
  CHECK(audio_like.modality == Modality::fused);
  CHECK(audio_like.clusters == cluster_scene(fa).clusters);
  CHECK(audio_like.clusters == std::vector<std::vector<int>>{{0, 1}, {2, 3}});

  const Partition video_like = cluster_scene_ws(fa, fv, 0.0);
  CHECK(video_like.clusters == cluster_scene(fv).clusters);
  CHECK(video_like.clusters == std::vector<std::vector<int>>{{0, 2}, {1, 3}});
}

TEST_CASE("weighted-sum requires matching utterance sequences") {
  const FeatureMatrix fa = euclidean_features({0, 1}, {{0.0}, {1.0}});
  const FeatureMatrix fv = euclidean_features({1, 0}, {{0.0}, {1.0}});
  CHECK_THROWS_AS(cluster_scene_ws(fa, fv), OrderMismatch);
}

TEST_CASE("weighted-sum of an empty scene is empty") {
  const FeatureMatrix fa = euclidean_features({}, {});
  const FeatureMatrix fv = euclidean_features({}, {});
  const Partition part = cluster_scene_ws(fa, fv);
  CHECK(part.clusters.empty());
  CHECK(part.modality == Modality::fused);
}
