#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "avdiar/errors.hpp"
#include "avdiar/fusion.hpp"
#include "avdiar/model.hpp"

namespace avdiar {

/// Diarization error of one scene for one system. `ref_ms` is the scored
/// speech duration (the DER denominator), `covered_ms` the duration the
/// system actually labeled — smaller than the scene total only for partial
/// partitions that discard utterances from scoring.
struct SceneScore {
  int scene_id = 0;
  double der = 0;
  Millis ref_ms = 0;
  Millis covered_ms = 0;
  Millis err_ms = 0;
};

/// One-to-one assignment of hypothesis clusters to reference speakers.
/// `speaker_of[c]` indexes `speakers`, or is -1 when the cluster matched no
/// speaker (it then counts entirely as error).
struct ClusterMap {
  std::vector<std::string> speakers;  // distinct reference speakers, sorted
  std::vector<int> speaker_of;        // per hypothesis cluster
};

namespace detail {

inline const std::string& reference_label(const std::map<int, std::string>& ref, int id) {
  const auto it = ref.find(id);
  if (it == ref.end())
    throw MissingReference("utterance " + std::to_string(id) + " has no reference speaker");
  return it->second;
}

}  // namespace detail

/// Maximum-duration-overlap one-to-one mapping between hypothesis clusters
/// and the reference speakers present in the partition's universe. Reuses the
/// exhaustive assignment engine on a zero-padded square matrix; ties resolve
/// to the lexicographically smallest assignment over (cluster, speaker-rank).
inline ClusterMap map_clusters(const Partition& hyp, const std::map<int, std::string>& ref,
                               const std::vector<Utterance>& utterances) {
  ClusterMap out;
  const std::vector<int> universe = hyp.universe();
  for (int id : universe) {
    const std::string& name = detail::reference_label(ref, id);
    if (!std::binary_search(out.speakers.begin(), out.speakers.end(), name))
      out.speakers.insert(
          std::upper_bound(out.speakers.begin(), out.speakers.end(), name), name);
  }

  const auto dur = detail::duration_index(utterances);
  const int clusters = static_cast<int>(hyp.clusters.size());
  const int speakers = static_cast<int>(out.speakers.size());
  const int n = std::max(clusters, speakers);
  out.speaker_of.assign(static_cast<size_t>(clusters), -1);
  if (n == 0) return out;

  std::vector<std::int64_t> w(static_cast<size_t>(n) * n, 0);
  for (int c = 0; c < clusters; ++c) {
    for (int id : hyp.clusters[c]) {
      const std::string& name = detail::reference_label(ref, id);
      const int s = static_cast<int>(
          std::lower_bound(out.speakers.begin(), out.speakers.end(), name) -
          out.speakers.begin());
      const auto dit = dur.find(id);
      if (dit == dur.end()) throw MissingUtterance("utterance " + std::to_string(id));
      w[static_cast<size_t>(c) * n + s] += dit->second;
    }
  }
  const std::vector<int> perm = detail::max_weight_assignment(w, n);
  for (int c = 0; c < clusters; ++c)
    if (perm[c] < speakers) out.speaker_of[c] = perm[c];
  return out;
}

/// DER of one partition against the reference, scored over exactly the
/// partition's universe: misattributed speech duration over scored speech
/// duration under the optimal cluster-to-speaker map. Missed speech and false
/// alarm are structurally zero because hypothesis and reference share the
/// subtitle segmentation.
inline SceneScore der_scene(const Partition& hyp, const std::map<int, std::string>& ref,
                            const std::vector<Utterance>& utterances) {
  const std::vector<int> universe = hyp.universe();
  if (universe.empty())
    throw EmptyScoredSet("scene " + std::to_string(hyp.scene_id) + " has nothing to score");

  const ClusterMap mapping = map_clusters(hyp, ref, utterances);
  const auto dur = detail::duration_index(utterances);

  SceneScore score;
  score.scene_id = hyp.scene_id;
  for (int c = 0; c < static_cast<int>(hyp.clusters.size()); ++c) {
    const std::string* mapped =
        mapping.speaker_of[c] >= 0 ? &mapping.speakers[mapping.speaker_of[c]] : nullptr;
    for (int id : hyp.clusters[c]) {
      const Millis d = dur.at(id);
      score.ref_ms += d;
      if (mapped == nullptr || *mapped != detail::reference_label(ref, id))
        score.err_ms += d;
    }
  }
  score.covered_ms = score.ref_ms;
  score.der = score.ref_ms > 0 ? static_cast<double>(score.err_ms) / score.ref_ms : 0.0;
  return score;
}

/// Oracle score of a scene: an utterance counts correct when either
/// modality's mapped label retrieves its reference speaker. By construction
/// this never exceeds either mono-modal DER.
inline SceneScore der_oracle(const Partition& qa, const Partition& qv,
                             const std::map<int, std::string>& ref,
                             const std::vector<Utterance>& utterances) {
  if (qa.universe() != qv.universe())
    throw UniverseMismatch("oracle needs both partitions over the same utterances");
  const std::vector<int> universe = qa.universe();
  if (universe.empty())
    throw EmptyScoredSet("scene " + std::to_string(qa.scene_id) + " has nothing to score");

  const ClusterMap map_a = map_clusters(qa, ref, utterances);
  const ClusterMap map_v = map_clusters(qv, ref, utterances);
  const auto dur = detail::duration_index(utterances);

  std::unordered_map<int, const std::string*> label_a, label_v;
  const auto fill = [](const Partition& part, const ClusterMap& m,
                       std::unordered_map<int, const std::string*>& out_labels) {
    for (int c = 0; c < static_cast<int>(part.clusters.size()); ++c) {
      const std::string* mapped = m.speaker_of[c] >= 0 ? &m.speakers[m.speaker_of[c]] : nullptr;
      for (int id : part.clusters[c]) out_labels[id] = mapped;
    }
  };
  fill(qa, map_a, label_a);
  fill(qv, map_v, label_v);

  SceneScore score;
  score.scene_id = qa.scene_id;
  for (int id : universe) {
    const Millis d = dur.at(id);
    score.ref_ms += d;
    const std::string& truth = detail::reference_label(ref, id);
    const std::string* la = label_a.at(id);
    const std::string* lv = label_v.at(id);
    const bool correct = (la != nullptr && *la == truth) || (lv != nullptr && *lv == truth);
    if (!correct) score.err_ms += d;
  }
  score.covered_ms = score.ref_ms;
  score.der = score.ref_ms > 0 ? static_cast<double>(score.err_ms) / score.ref_ms : 0.0;
  return score;
}

/// Share of a scene's speech that a partial partition keeps for scoring.
inline double coverage_pct(const std::vector<int>& kept_ids,
                           const std::vector<int>& scene_ids,
                           const std::vector<Utterance>& utterances) {
  const auto dur = detail::duration_index(utterances);
  Millis kept = 0, total = 0;
  for (int id : kept_ids) kept += dur.at(id);
  for (int id : scene_ids) total += dur.at(id);
  return total > 0 ? 100.0 * static_cast<double>(kept) / static_cast<double>(total) : 100.0;
}

/// Duration-weighted single-show DER over scored scenes.
inline double show_der(const std::vector<SceneScore>& scenes) {
  Millis err = 0, total = 0;
  for (const auto& s : scenes) {
    err += s.err_ms;
    total += s.ref_ms;
  }
  return total > 0 ? static_cast<double>(err) / static_cast<double>(total) : 0.0;
}

/// Precision/recall/F1 triple for the shot metrics.
struct DetectionScore {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  int tp = 0;
  int hyp_count = 0;
  int ref_count = 0;
};

namespace detail {

inline DetectionScore finish_detection_score(int tp, int hyp_count, int ref_count) {
  DetectionScore s;
  s.tp = tp;
  s.hyp_count = hyp_count;
  s.ref_count = ref_count;
  s.precision = hyp_count > 0 ? static_cast<double>(tp) / hyp_count : (ref_count == 0 ? 1.0 : 0.0);
  s.recall = ref_count > 0 ? static_cast<double>(tp) / ref_count : (hyp_count == 0 ? 1.0 : 0.0);
  s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall)
                                    : (hyp_count == 0 && ref_count == 0 ? 1.0 : 0.0);
  return s;
}

}  // namespace detail

/// Cut-detection score: a hypothesized cut (frame index) is a hit when an
/// unmatched reference cut lies within `tol_frames`; matching is greedy over
/// hypothesis cuts in ascending order, each taking the nearest remaining
/// reference cut (ties to the earlier one).
inline DetectionScore score_shot_cuts(std::vector<int> hyp, std::vector<int> ref,
                                      int tol_frames = 1) {
  std::sort(hyp.begin(), hyp.end());
  std::sort(ref.begin(), ref.end());
  std::vector<bool> used(ref.size(), false);
  int tp = 0;
  for (int h : hyp) {
    int best = -1;
    int best_dist = tol_frames + 1;
    for (int r = 0; r < static_cast<int>(ref.size()); ++r) {
      if (used[r]) continue;
      const int dist = std::abs(ref[r] - h);
      if (dist < best_dist) {
        best_dist = dist;
        best = r;
      }
    }
    if (best >= 0) {
      used[best] = true;
      ++tp;
    }
  }
  return detail::finish_detection_score(tp, static_cast<int>(hyp.size()),
                                        static_cast<int>(ref.size()));
}

/// Similarity-detection score over per-shot partner lists: a shot counts as
/// correctly paired when its hypothesized and reference partner lists share
/// at least one shot. Precision divides by shots with a non-empty hypothesis
/// list, recall by shots with a non-empty reference list.
inline DetectionScore score_shot_similarity(
    const std::vector<std::pair<int, int>>& hyp_pairs,
    const std::vector<std::pair<int, int>>& ref_pairs, int shot_count) {
  const auto lists = [shot_count](const std::vector<std::pair<int, int>>& pairs) {
    std::vector<std::vector<int>> per_shot(static_cast<size_t>(shot_count));
    for (const auto& [a, b] : pairs) {
      per_shot[static_cast<size_t>(a)].push_back(b);
      per_shot[static_cast<size_t>(b)].push_back(a);
    }
    for (auto& l : per_shot) std::sort(l.begin(), l.end());
    return per_shot;
  };
  const std::vector<std::vector<int>> hyp = lists(hyp_pairs);
  const std::vector<std::vector<int>> ref = lists(ref_pairs);

  int tp = 0, hyp_nonempty = 0, ref_nonempty = 0;
  for (int s = 0; s < shot_count; ++s) {
    if (!hyp[s].empty()) ++hyp_nonempty;
    if (!ref[s].empty()) ++ref_nonempty;
    std::vector<int> common;
    std::set_intersection(hyp[s].begin(), hyp[s].end(), ref[s].begin(), ref[s].end(),
                          std::back_inserter(common));
    if (!common.empty()) ++tp;
  }
  return detail::finish_detection_score(tp, hyp_nonempty, ref_nonempty);
}

}  // namespace avdiar
