#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "avdiar/features.hpp"

using namespace avdiar;

namespace {

Scene scene_of(std::vector<int> ids) {
  Scene sc;
  sc.id = 0;
  sc.utterance_ids = std::move(ids);
  return sc;
}

Shot shot(int index, Millis start, Millis end, ShotLabel label) {
  Shot s;
  s.index = index;
  s.span = TimeSpan{start, end};
  s.label = label;
  return s;
}

Utterance utt(int id, Millis start, Millis end) {
  Utterance u;
  u.id = id;
  u.span = TimeSpan{start, end};
  return u;
}

}  // namespace

TEST_CASE("video vectors hold per-label overlap seconds, exact on the ms grid") {
  // An utterance crossing the boundary between labels 126 and 127 for
  // 1560 and 1160 ms; every other component must be exactly zero.
  std::vector<Shot> shots;
  Millis t = 0;
  for (int i = 0; i < 126; ++i) {
    shots.push_back(shot(i, t, t + 100, i));
    t += 100;
  }
  shots.push_back(shot(126, t, t + 1560, 126));
  shots.push_back(shot(127, t + 1560, t + 1560 + 5000, 127));
  const std::vector<Utterance> utterances = {utt(205, t, t + 1560 + 1160)};

  const FeatureMatrix f =
      video_vectors(scene_of({205}), shots, /*label_count=*/128, utterances);
  CHECK(f.modality == Modality::video);
  CHECK(f.metric == Metric::euclidean);
  CHECK(f.dim == 128);
  REQUIRE(f.rows.size() == 1);
  const auto& v = f.rows[0];
  CHECK(v[126] == 1.56);
  CHECK(v[127] == 1.16);
  for (int k = 0; k < 126; ++k) CHECK(v[k] == 0.0);
}

TEST_CASE("an utterance inside one shot yields a spike vector") {
  const std::vector<Shot> shots = {shot(0, 0, 10000, 3)};
  const FeatureMatrix f =
      video_vectors(scene_of({1}), shots, 5, {utt(1, 4000, 6000)});
  CHECK(f.rows[0] == std::vector<double>{0, 0, 0, 2.0, 0});
}

TEST_CASE("video components sum to the utterance duration when shots tile time") {
  const std::vector<Shot> shots = {shot(0, 0, 700, 0), shot(1, 700, 1500, 1),
                                   shot(2, 1500, 4000, 0), shot(3, 4000, 9000, 2)};
  const std::vector<Utterance> utterances = {utt(0, 100, 5100), utt(1, 650, 800)};
  const FeatureMatrix f = video_vectors(scene_of({0, 1}), shots, 3, utterances);
  for (size_t r = 0; r < f.rows.size(); ++r) {
    double sum = 0;
    for (double c : f.rows[r]) sum += c;
    CHECK(sum == Catch::Approx(utterances[r].span.duration_s()).epsilon(1e-12));
  }
}

TEST_CASE("video vectors require every scene utterance") {
  const std::vector<Shot> shots = {shot(0, 0, 1000, 0)};
  CHECK_THROWS_AS(video_vectors(scene_of({9}), shots, 1, {utt(1, 0, 500)}),
                  MissingUtterance);
}

TEST_CASE("audio vectors select embedding rows in scene order") {
  EmbeddingTable table;
  table.dim = 2;
  table.vectors[1] = {1.0, 10.0};
  table.vectors[2] = {2.0, 20.0};
  table.vectors[3] = {3.0, 30.0};
  table.vectors[8] = {8.0, 80.0};
  const FeatureMatrix f = audio_vectors(scene_of({3, 1, 2}), table);
  CHECK(f.modality == Modality::audio);
  CHECK(f.metric == Metric::normalized_euclidean);
  CHECK(f.dim == 2);
  CHECK(f.utterance_ids == std::vector<int>{3, 1, 2});
  REQUIRE(f.rows.size() == 3);
  CHECK(f.rows[0] == std::vector<double>{3.0, 30.0});
  CHECK(f.rows[1] == std::vector<double>{1.0, 10.0});
  CHECK(f.rows[2] == std::vector<double>{2.0, 20.0});

  CHECK_THROWS_AS(audio_vectors(scene_of({1, 7}), table), MissingUtterance);
}

TEST_CASE("euclidean distances follow pythagoras") {
  FeatureMatrix f;
  f.metric = Metric::euclidean;
  f.dim = 2;
  f.utterance_ids = {0, 1, 2};
  f.rows = {{0.0, 0.0}, {3.0, 4.0}, {0.0, 0.0}};
  const DistanceMatrix d = distance_matrix(f);
  CHECK(d.at(0, 1) == 5.0);
  CHECK(d.at(1, 0) == 5.0);
  CHECK(d.at(0, 2) == 0.0);
  CHECK(d.at(0, 0) == 0.0);
  CHECK(d.at(1, 1) == 0.0);
  CHECK(d.max_value() == 5.0);
}

TEST_CASE("singleton and empty matrices are all zero") {
  FeatureMatrix f;
  f.metric = Metric::normalized_euclidean;
  f.dim = 3;
  f.utterance_ids = {4};
  f.rows = {{1.0, 2.0, 3.0}};
  const DistanceMatrix d1 = distance_matrix(f);
  CHECK(d1.n == 1);
  CHECK(d1.at(0, 0) == 0.0);

  f.utterance_ids.clear();
  f.rows.clear();
  CHECK(distance_matrix(f).n == 0);
}

TEST_CASE("normalized euclidean rescales each dimension by its deviation") {
  // Dimension 0 has values {0, 2, 4}: mean 2, population variance 8/3.
  // Dimension 1 has values {0, 1, 2}: variance 2/3.
  FeatureMatrix f;
  f.metric = Metric::normalized_euclidean;
  f.dim = 2;
  f.utterance_ids = {0, 1, 2};
  f.rows = {{0.0, 0.0}, {2.0, 1.0}, {4.0, 2.0}};
  const DistanceMatrix d = distance_matrix(f);
  const double s0 = std::sqrt(8.0 / 3.0), s1 = std::sqrt(2.0 / 3.0);
  const double expected01 = std::sqrt(std::pow(2.0 / s0, 2) + std::pow(1.0 / s1, 2));
  const double expected02 = std::sqrt(std::pow(4.0 / s0, 2) + std::pow(2.0 / s1, 2));
  CHECK(d.at(0, 1) == Catch::Approx(expected01).epsilon(1e-12));
  CHECK(d.at(0, 2) == Catch::Approx(expected02).epsilon(1e-12));
  CHECK(d.at(0, 1) == d.at(1, 0));
}

TEST_CASE("normalized euclidean is invariant to per-dimension scaling") {
  FeatureMatrix f;
  f.metric = Metric::normalized_euclidean;
  f.dim = 3;
  f.utterance_ids = {0, 1, 2, 3};
  f.rows = {{1.0, -2.0, 0.5}, {0.0, 4.0, 0.25}, {2.5, 1.0, -1.0}, {1.5, 0.0, 3.0}};
  const DistanceMatrix base = distance_matrix(f);

  FeatureMatrix g = f;
  const double scales[3] = {7.0, 0.01, 250.0};
  for (auto& row : g.rows)
    for (int k = 0; k < 3; ++k) row[k] *= scales[k];
  const DistanceMatrix scaled = distance_matrix(g);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(scaled.at(i, j) == Catch::Approx(base.at(i, j)).epsilon(1e-9));
}

TEST_CASE("constant dimensions drop out of the normalized metric") {
  FeatureMatrix f;
  f.metric = Metric::normalized_euclidean;
  f.dim = 2;
  f.utterance_ids = {0, 1};
  f.rows = {{5.0, 0.0}, {5.0, 2.0}};  // dimension 0 is constant
  const DistanceMatrix d = distance_matrix(f);
  // Only dimension 1 contributes: values {0,2}, sigma 1 -> distance 2.
  CHECK(d.at(0, 1) == Catch::Approx(2.0).epsilon(1e-12));
}
