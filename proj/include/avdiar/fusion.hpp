#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "avdiar/errors.hpp"
#include "avdiar/features.hpp"
#include "avdiar/model.hpp"
#include "avdiar/pmedian.hpp"

namespace avdiar {

/// Speech-time agreement between one modality's clusters and the other's:
/// entry (i, j) is the summed duration in milliseconds of the utterances that
/// audio cluster i and video cluster j both contain.
struct MatchWeightMatrix {
  int audio_clusters = 0;
  int video_clusters = 0;
  std::vector<std::int64_t> w;  // row-major, audio rows x video columns

  std::int64_t at(int i, int j) const {
    return w[static_cast<size_t>(i) * video_clusters + j];
  }
  std::int64_t& at(int i, int j) {
    return w[static_cast<size_t>(i) * video_clusters + j];
  }
};

struct MatchResult {
  std::vector<std::pair<int, int>> pairs;  // (audio cluster, video cluster)
  std::int64_t total_ms = 0;
};

namespace detail {

/// Exhaustive one-to-one assignment on a square weight matrix: returns the
/// permutation (column per row) of maximal total weight. Permutations are
/// visited in lexicographic order with strict improvement, so ties resolve to
/// the lexicographically smallest permutation.
inline std::vector<int> max_weight_assignment(const std::vector<std::int64_t>& w, int n) {
  if (n > 8)
    throw SizeGuardExceeded("assignment size " + std::to_string(n) +
                            " exceeds exhaustive-matching limit 8");
  std::vector<int> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  std::int64_t best_total = std::numeric_limits<std::int64_t>::min();
  do {
    std::int64_t total = 0;
    for (int r = 0; r < n; ++r) total += w[static_cast<size_t>(r) * n + perm[r]];
    if (total > best_total) {
      best_total = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline std::unordered_map<int, Millis> duration_index(const std::vector<Utterance>& utts) {
  std::unordered_map<int, Millis> dur;
  dur.reserve(utts.size());
  for (const auto& u : utts) dur.emplace(u.id, u.span.duration_ms());
  return dur;
}

}  // namespace detail

/// Builds the agreement matrix between two partitions of the same utterance
/// set. Every millisecond of speech lands in exactly one cell, so the matrix
/// total equals the partitioned speech time.
inline MatchWeightMatrix match_weights(const Partition& audio, const Partition& video,
                                       const std::vector<Utterance>& utterances) {
  if (audio.universe() != video.universe())
    throw UniverseMismatch("partitions cover different utterance sets");

  const auto dur = detail::duration_index(utterances);
  std::unordered_map<int, int> video_cluster_of;
  for (int j = 0; j < static_cast<int>(video.clusters.size()); ++j)
    for (int id : video.clusters[j]) video_cluster_of[id] = j;

  MatchWeightMatrix m;
  m.audio_clusters = static_cast<int>(audio.clusters.size());
  m.video_clusters = static_cast<int>(video.clusters.size());
  m.w.assign(static_cast<size_t>(m.audio_clusters) * m.video_clusters, 0);
  for (int i = 0; i < m.audio_clusters; ++i) {
    for (int id : audio.clusters[i]) {
      const auto dit = dur.find(id);
      if (dit == dur.end())
        throw MissingUtterance("utterance " + std::to_string(id));
      m.at(i, video_cluster_of.at(id)) += dit->second;
    }
  }
  return m;
}

/// Optimal one-to-one pairing of audio and video clusters by total agreement.
/// Rectangular matrices are padded with zero-weight dummies; only pairs of
/// real clusters are reported.
inline MatchResult optimal_matching(const MatchWeightMatrix& m) {
  const int n = std::max(m.audio_clusters, m.video_clusters);
  MatchResult r;
  if (n == 0) return r;
  std::vector<std::int64_t> padded(static_cast<size_t>(n) * n, 0);
  for (int i = 0; i < m.audio_clusters; ++i)
    for (int j = 0; j < m.video_clusters; ++j)
      padded[static_cast<size_t>(i) * n + j] = m.at(i, j);
  const std::vector<int> perm = detail::max_weight_assignment(padded, n);
  for (int i = 0; i < m.audio_clusters; ++i) {
    if (perm[i] >= m.video_clusters) continue;
    r.pairs.emplace_back(i, perm[i]);
    r.total_ms += m.at(i, perm[i]);
  }
  return r;
}

/// Outcome of fusing one scene's audio and video partitions.
struct FusionResult {
  MatchWeightMatrix weights;
  MatchResult matching;
  Partition kept;              // intersections of matched cluster pairs
  std::vector<int> discarded;  // utterances outside every intersection
  Partition final_partition;   // kept clusters with discards reallocated
  bool degenerate = false;     // every intersection empty; audio kept as-is
};

/// Intersects each matched pair of clusters and splits the scene into kept
/// and discarded utterances. One kept cluster is produced per matched pair,
/// so an empty intersection shows up as an empty kept cluster.
inline void intersect_and_discard(const Partition& audio, const Partition& video,
                                  const MatchResult& matching, FusionResult& out) {
  out.kept.scene_id = audio.scene_id;
  out.kept.modality = Modality::fused;
  std::vector<int> kept_ids;
  for (const auto& [i, j] : matching.pairs) {
    std::vector<int> inter;
    std::set_intersection(audio.clusters[i].begin(), audio.clusters[i].end(),
                          video.clusters[j].begin(), video.clusters[j].end(),
                          std::back_inserter(inter));
    kept_ids.insert(kept_ids.end(), inter.begin(), inter.end());
    out.kept.clusters.push_back(std::move(inter));
  }
  std::sort(kept_ids.begin(), kept_ids.end());
  out.discarded.clear();
  const std::vector<int> universe = audio.universe();
  std::set_difference(universe.begin(), universe.end(), kept_ids.begin(), kept_ids.end(),
                      std::back_inserter(out.discarded));
}

/// Reassigns each discarded utterance to the kept cluster whose audio medoid
/// it is nearest to, under the scene-wide normalized audio distance (the
/// normalization sees every utterance of the scene, discards included). Ties
/// go to the lower medoid id.
inline Partition reallocate(const Partition& kept, const std::vector<int>& discarded,
                            const FeatureMatrix& audio_features) {
  for (const auto& cluster : kept.clusters)
    if (cluster.empty())
      throw FusionDegenerate("empty kept cluster in scene " +
                             std::to_string(kept.scene_id));

  std::unordered_map<int, int> row_of;
  for (int r = 0; r < static_cast<int>(audio_features.utterance_ids.size()); ++r)
    row_of[audio_features.utterance_ids[r]] = r;
  const auto row_for = [&](int id) {
    const auto it = row_of.find(id);
    if (it == row_of.end())
      throw MissingUtterance("utterance " + std::to_string(id) +
                             " absent from scene audio features");
    return it->second;
  };

  const DistanceMatrix d = distance_matrix(audio_features);
  std::vector<int> medoid_rows;
  for (const auto& cluster : kept.clusters) {
    std::vector<int> member_rows;
    member_rows.reserve(cluster.size());
    for (int id : cluster) member_rows.push_back(row_for(id));
    medoid_rows.push_back(medoid(member_rows, d));
  }

  Partition final_part = kept;
  final_part.modality = Modality::fused;
  final_part.centers.clear();
  for (int r : medoid_rows) final_part.centers.push_back(audio_features.utterance_ids[r]);
  for (int id : discarded) {
    const int row = row_for(id);
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < static_cast<int>(medoid_rows.size()); ++c) {
      const double dist = d.at(row, medoid_rows[c]);
      const int medoid_id = audio_features.utterance_ids[medoid_rows[c]];
      const bool wins =
          dist < best_d ||
          (dist == best_d && medoid_id < audio_features.utterance_ids[medoid_rows[best]]);
      if (wins) {
        best_d = dist;
        best = c;
      }
    }
    final_part.clusters[static_cast<size_t>(best)].push_back(id);
  }
  for (auto& cluster : final_part.clusters) std::sort(cluster.begin(), cluster.end());
  return final_part;
}

/// Full fusion of one scene: match clusters across modalities, keep the
/// intersections, reallocate the rest onto the kept clusters' audio medoids.
/// Any empty intersection means the modalities fully disagree about one
/// matched pair; the scene is then flagged degenerate and falls back to the
/// audio partition unchanged (nothing discarded).
inline FusionResult fuse_scene(const Partition& audio, const Partition& video,
                               const FeatureMatrix& audio_features,
                               const std::vector<Utterance>& utterances) {
  FusionResult out;
  out.weights = match_weights(audio, video, utterances);
  out.matching = optimal_matching(out.weights);
  intersect_and_discard(audio, video, out.matching, out);
  const bool any_empty =
      out.kept.clusters.empty() ||
      std::any_of(out.kept.clusters.begin(), out.kept.clusters.end(),
                  [](const std::vector<int>& c) { return c.empty(); });
  if (any_empty) {
    out.degenerate = true;
    out.kept = audio;
    out.kept.modality = Modality::fused;
    out.kept.centers.clear();
    out.discarded.clear();
    out.final_partition = out.kept;
    return out;
  }
  out.final_partition = reallocate(out.kept, out.discarded, audio_features);
  return out;
}

}  // namespace avdiar
