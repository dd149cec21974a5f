#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "avdiar/evaluation.hpp"
#include "oracles.hpp"

using namespace avdiar;

namespace {

std::vector<Utterance> utterances_1s(int n) {
  std::vector<Utterance> utts(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    utts[i].id = i + 1;
    utts[i].span = TimeSpan{static_cast<Millis>(i) * 1000, static_cast<Millis>(i + 1) * 1000};
  }
  return utts;
}

Partition hyp_of(std::vector<std::vector<int>> clusters) {
  Partition p;
  p.modality = Modality::fused;
  p.clusters = std::move(clusters);
  return p;
}

}  // namespace

TEST_CASE("a partition matching the reference scores zero error") {
  const auto utts = utterances_1s(4);
  const std::map<int, std::string> ref{{1, "A"}, {2, "A"}, {3, "B"}, {4, "B"}};
  const SceneScore s = der_scene(hyp_of({{1, 2}, {3, 4}}), ref, utts);
  CHECK(s.der == 0.0);
  CHECK(s.err_ms == 0);
  CHECK(s.ref_ms == 4000);
  CHECK(s.covered_ms == 4000);
}

TEST_CASE("one misplaced second out of four scores a quarter") {
  const auto utts = utterances_1s(4);
  const std::map<int, std::string> ref{{1, "A"}, {2, "A"}, {3, "B"}, {4, "B"}};
  const SceneScore s = der_scene(hyp_of({{1, 2, 3}, {4}}), ref, utts);
  CHECK(s.err_ms == 1000);
  CHECK(s.der == 0.25);
}

TEST_CASE("error is weighted by duration, not utterance count") {
  std::vector<Utterance> utts = utterances_1s(3);
  utts[2].span = TimeSpan{2000, 8000};  // utterance 3 lasts 6 s
  const std::map<int, std::string> ref{{1, "A"}, {2, "A"}, {3, "B"}};
  // Cluster {1,3} maps to B by duration; utterance 1 becomes the error.
  const SceneScore s = der_scene(hyp_of({{1, 3}, {2}}), ref, utts);
  CHECK(s.ref_ms == 8000);
  CHECK(s.err_ms == 1000);
  CHECK(s.der == 0.125);
}

TEST_CASE("scores are invariant under speaker renaming and cluster order") {
  std::mt19937 rng(2401);
  std::uniform_int_distribution<int> nd(1, 9);
  std::uniform_int_distribution<int> spk(0, 2);
  std::uniform_int_distribution<int> cl(0, 2);
  const std::vector<std::string> names{"ann", "bea", "cy"};
  const std::vector<std::string> renamed{"zoe", "yan", "xia"};
  for (int trial = 0; trial < 100; ++trial) {
    const int n = nd(rng);
    const auto utts = utterances_1s(n);
    std::map<int, std::string> ref, ref2;
    std::vector<std::vector<int>> clusters(3);
    for (int i = 1; i <= n; ++i) {
      const int s = spk(rng);
      ref[i] = names[static_cast<size_t>(s)];
      ref2[i] = renamed[static_cast<size_t>(s)];
      clusters[static_cast<size_t>(cl(rng))].push_back(i);
    }
    clusters.erase(std::remove_if(clusters.begin(), clusters.end(),
                                  [](const std::vector<int>& c) { return c.empty(); }),
                   clusters.end());
    if (clusters.empty()) continue;

    const SceneScore base = der_scene(hyp_of(clusters), ref, utts);
    const SceneScore renamed_score = der_scene(hyp_of(clusters), ref2, utts);
    CAPTURE(trial, n);
    CHECK(renamed_score.err_ms == base.err_ms);
    CHECK(renamed_score.der == base.der);

    std::vector<std::vector<int>> shuffled = clusters;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const SceneScore shuffled_score = der_scene(hyp_of(shuffled), ref, utts);
    CHECK(shuffled_score.err_ms == base.err_ms);
    CHECK(shuffled_score.der == base.der);
  }
}

TEST_CASE("error equals scored time minus the best injective overlap") {
  std::mt19937 rng(5522);
  std::uniform_int_distribution<int> nd(1, 10);
  std::uniform_int_distribution<int> spk(0, 3);
  std::uniform_int_distribution<int> cl(0, 3);
  std::uniform_int_distribution<Millis> dur(1, 4000);
  const std::vector<std::string> names{"a", "b", "c", "d"};
  for (int trial = 0; trial < 60; ++trial) {
    const int n = nd(rng);
    std::vector<Utterance> utts(static_cast<size_t>(n));
    std::map<int, std::string> ref;
    std::map<int, Millis> durations;
    std::vector<std::vector<int>> clusters(4);
    Millis t = 0, total = 0;
    for (int i = 0; i < n; ++i) {
      const Millis length = dur(rng);
      utts[i].id = i + 1;
      utts[i].span = TimeSpan{t, t + length};
      t += length;
      total += length;
      durations[i + 1] = length;
      ref[i + 1] = names[static_cast<size_t>(spk(rng))];
      clusters[static_cast<size_t>(cl(rng))].push_back(i + 1);
    }
    clusters.erase(std::remove_if(clusters.begin(), clusters.end(),
                                  [](const std::vector<int>& c) { return c.empty(); }),
                   clusters.end());
    if (clusters.empty()) continue;

    const SceneScore s = der_scene(hyp_of(clusters), ref, utts);
    const std::int64_t best = avdiar::testing::oracle_mapping(clusters, ref, durations);
    CAPTURE(trial, n);
    CHECK(s.err_ms == total - best);
  }
}

TEST_CASE("clusters beyond the speaker count stay unmapped and count as error") {
  const auto utts = utterances_1s(3);
  const std::map<int, std::string> ref{{1, "solo"}, {2, "solo"}, {3, "solo"}};
  const SceneScore s = der_scene(hyp_of({{1}, {2, 3}}), ref, utts);
  // The two-utterance cluster takes the only speaker; the rest is error.
  CHECK(s.err_ms == 1000);
  CHECK(s.der == Catch::Approx(1.0 / 3.0));

  const ClusterMap m = map_clusters(hyp_of({{1}, {2, 3}}), ref, utts);
  REQUIRE(m.speakers == std::vector<std::string>{"solo"});
  CHECK(m.speaker_of == std::vector<int>{-1, 0});
}

TEST_CASE("speakers beyond the cluster count are simply absent") {
  const auto utts = utterances_1s(4);
  const std::map<int, std::string> ref{{1, "a"}, {2, "a"}, {3, "b"}, {4, "c"}};
  const ClusterMap m = map_clusters(hyp_of({{1, 2, 3, 4}}), ref, utts);
  CHECK(m.speakers == std::vector<std::string>{"a", "b", "c"});
  CHECK(m.speaker_of == std::vector<int>{0});  // "a" carries the most time
  const SceneScore s = der_scene(hyp_of({{1, 2, 3, 4}}), ref, utts);
  CHECK(s.err_ms == 2000);
}

TEST_CASE("scoring rejects empty or unannotated scenes") {
  const auto utts = utterances_1s(2);
  CHECK_THROWS_AS(der_scene(hyp_of({}), {{1, "a"}}, utts), EmptyScoredSet);
  CHECK_THROWS_AS(der_scene(hyp_of({{1, 2}}), {{1, "a"}}, utts), MissingReference);
}

TEST_CASE("the oracle accepts an utterance when either modality retrieves it") {
  const auto utts = utterances_1s(4);
  const std::map<int, std::string> ref{{1, "A"}, {2, "A"}, {3, "B"}, {4, "B"}};
  // Audio errs on 4, video errs on 2; together they recover everything.
  const Partition qa = hyp_of({{1, 2, 4}, {3}});
  const Partition qv = hyp_of({{1}, {2, 3, 4}});
  CHECK(der_scene(qa, ref, utts).der == 0.25);
  CHECK(der_scene(qv, ref, utts).der == 0.25);
  const SceneScore oracle = der_oracle(qa, qv, ref, utts);
  CHECK(oracle.der == 0.0);
  CHECK(oracle.ref_ms == 4000);
}

TEST_CASE("the oracle never beats both modalities' shared mistakes") {
  const auto utts = utterances_1s(4);
  const std::map<int, std::string> ref{{1, "A"}, {2, "A"}, {3, "B"}, {4, "B"}};
  // Both modalities bury utterance 3 inside the A cluster.
  const Partition qa = hyp_of({{1, 2, 3}, {4}});
  const Partition qv = hyp_of({{1, 2, 3}, {4}});
  CHECK(der_oracle(qa, qv, ref, utts).der == 0.25);
}

TEST_CASE("oracle error never exceeds either mono-modal error") {
  std::mt19937 rng(8080);
  std::uniform_int_distribution<int> nd(1, 10);
  std::uniform_int_distribution<int> spk(0, 2);
  std::uniform_int_distribution<int> cl(0, 1);
  const std::vector<std::string> names{"a", "b", "c"};
  for (int trial = 0; trial < 80; ++trial) {
    const int n = nd(rng);
    const auto utts = utterances_1s(n);
    std::map<int, std::string> ref;
    std::vector<std::vector<int>> ca(2), cv(2);
    for (int i = 1; i <= n; ++i) {
      ref[i] = names[static_cast<size_t>(spk(rng))];
      ca[static_cast<size_t>(cl(rng))].push_back(i);
      cv[static_cast<size_t>(cl(rng))].push_back(i);
    }
    const auto strip = [](std::vector<std::vector<int>>& c) {
      c.erase(std::remove_if(c.begin(), c.end(),
                             [](const std::vector<int>& x) { return x.empty(); }),
              c.end());
    };
    strip(ca);
    strip(cv);
    if (ca.empty() || cv.empty()) continue;

    const SceneScore a = der_scene(hyp_of(ca), ref, utts);
    const SceneScore v = der_scene(hyp_of(cv), ref, utts);
    const SceneScore o = der_oracle(hyp_of(ca), hyp_of(cv), ref, utts);
    CAPTURE(trial, n);
    CHECK(o.err_ms <= a.err_ms);
    CHECK(o.err_ms <= v.err_ms);
  }
}

TEST_CASE("the oracle requires both partitions over the same utterances") {
  const auto utts = utterances_1s(3);
  const std::map<int, std::string> ref{{1, "a"}, {2, "a"}, {3, "a"}};
  CHECK_THROWS_AS(der_oracle(hyp_of({{1, 2}}), hyp_of({{1, 2, 3}}), ref, utts),
                  UniverseMismatch);
  CHECK_THROWS_AS(der_oracle(hyp_of({}), hyp_of({}), ref, utts), EmptyScoredSet);
}

TEST_CASE("coverage is the kept share of scene speech") {
  const auto utts = utterances_1s(4);
  CHECK(coverage_pct({1, 2, 4}, {1, 2, 3, 4}, utts) == 75.0);
  CHECK(coverage_pct({}, {1, 2}, utts) == 0.0);
  CHECK(coverage_pct({}, {}, utts) == 100.0);
}

TEST_CASE("show error is the duration-weighted aggregate") {
  SceneScore a;
  a.err_ms = 1000;
  a.ref_ms = 4000;
  SceneScore b;
  b.err_ms = 0;
  b.ref_ms = 1000;
  CHECK(show_der({a, b}) == 0.2);
  CHECK(show_der({}) == 0.0);
}

TEST_CASE("cut scoring matches each reference cut at most once") {
  DetectionScore s = score_shot_cuts({3, 10}, {3, 10});
  CHECK(s.tp == 2);
  CHECK(s.precision == 1.0);
  CHECK(s.recall == 1.0);
  CHECK(s.f1 == 1.0);

  // One frame of slack is allowed, two are not.
  CHECK(score_shot_cuts({4}, {3}).tp == 1);
  CHECK(score_shot_cuts({5}, {3}).tp == 0);
  CHECK(score_shot_cuts({5}, {3}, 2).tp == 1);

  // The second hypothesis finds reference 3 already taken.
  s = score_shot_cuts({3, 4}, {3, 10});
  CHECK(s.tp == 1);
  CHECK(s.precision == 0.5);
  CHECK(s.recall == 0.5);
}

TEST_CASE("equidistant reference cuts resolve to the earlier one") {
  // If 4 grabbed reference 5 instead, the second hypothesis would miss.
  const DetectionScore s = score_shot_cuts({4, 5}, {3, 5});
  CHECK(s.tp == 2);
}

TEST_CASE("cut scoring edge conventions") {
  const DetectionScore both_empty = score_shot_cuts({}, {});
  CHECK(both_empty.precision == 1.0);
  CHECK(both_empty.recall == 1.0);
  CHECK(both_empty.f1 == 1.0);

  const DetectionScore no_hyp = score_shot_cuts({}, {5});
  CHECK(no_hyp.precision == 0.0);
  CHECK(no_hyp.recall == 0.0);
  CHECK(no_hyp.f1 == 0.0);

  const DetectionScore no_ref = score_shot_cuts({5}, {});
  CHECK(no_ref.precision == 0.0);
  CHECK(no_ref.recall == 0.0);
  CHECK(no_ref.f1 == 0.0);
}

TEST_CASE("similarity scoring compares per-shot partner lists") {
  DetectionScore s = score_shot_similarity({{0, 2}}, {{0, 2}}, 3);
  CHECK(s.tp == 2);  // shots 0 and 2 both recover their partner
  CHECK(s.precision == 1.0);
  CHECK(s.recall == 1.0);
  CHECK(s.f1 == 1.0);

  // Extra hypothesized pair: precision drops, recall holds.
  s = score_shot_similarity({{0, 2}, {1, 3}}, {{0, 2}}, 4);
  CHECK(s.tp == 2);
  CHECK(s.precision == 0.5);
  CHECK(s.recall == 1.0);

  // A shot with partners in both lists but no shared one is wrong.
  s = score_shot_similarity({{0, 4}}, {{0, 2}}, 5);
  CHECK(s.tp == 0);
  CHECK(s.precision == 0.0);
  CHECK(s.recall == 0.0);

  // One shared partner among several is enough.
  s = score_shot_similarity({{0, 2}, {0, 4}}, {{0, 2}}, 5);
  CHECK(s.tp == 2);
  CHECK(s.precision == Catch::Approx(2.0 / 3.0));
  CHECK(s.recall == 1.0);
}

TEST_CASE("similarity scoring edge conventions") {
  const DetectionScore both_empty = score_shot_similarity({}, {}, 4);
  CHECK(both_empty.precision == 1.0);
  CHECK(both_empty.recall == 1.0);
  CHECK(both_empty.f1 == 1.0);

  const DetectionScore no_hyp = score_shot_similarity({}, {{0, 1}}, 4);
  CHECK(no_hyp.f1 == 0.0);
  const DetectionScore no_ref = score_shot_similarity({{0, 1}}, {}, 4);
  CHECK(no_ref.f1 == 0.0);
}
