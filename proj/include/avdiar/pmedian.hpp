#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "avdiar/errors.hpp"
#include "avdiar/features.hpp"
#include "avdiar/model.hpp"

namespace avdiar {

/// Exact solution of the p-median program on a distance matrix: pick p of the
/// n points as centers and assign every point to its nearest center so the
/// summed assignment distance is minimal.
struct PMedianSolution {
  std::vector<int> centers;     // row indices, strictly increasing
  std::vector<int> assignment;  // assignment[i] = index into centers
  double objective = 0;
};

namespace detail {

/// Nearest-center assignment for a fixed center set; ties go to the center
/// with the lower row index (centers are kept sorted, so the first winner
/// encountered is the right one).
inline double assign_nearest(const DistanceMatrix& d, const std::vector<int>& centers,
                             std::vector<int>& assignment) {
  const int n = d.n;
  assignment.assign(static_cast<size_t>(n), 0);
  double total = 0;
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double best_d = d.at(i, centers[0]);
    for (int c = 1; c < static_cast<int>(centers.size()); ++c) {
      const double dist = d.at(i, centers[c]);
      if (dist < best_d) {
        best_d = dist;
        best = c;
      }
    }
    assignment[i] = best;
    total += best_d;
  }
  return total;
}

/// Advances a strictly increasing index combination to its lexicographic
/// successor; returns false once the last combination has been visited.
inline bool next_combination(std::vector<int>& comb, int n) {
  const int p = static_cast<int>(comb.size());
  for (int i = p - 1; i >= 0; --i) {
    if (comb[i] < n - p + i) {
      ++comb[i];
      for (int j = i + 1; j < p; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Exhaustive center-set enumeration. Center sets are visited in
/// lexicographic order and improvements are strict, so objective ties resolve
/// to the lexicographically smallest center set. Guarded against center-set
/// counts that would not finish: n must stay within 64 for p <= 2 and within
/// 24 otherwise.
inline PMedianSolution pmedian_solve(const DistanceMatrix& d, int p) {
  const int n = d.n;
  if (p < 1 || p > n) throw InvalidP("p=" + std::to_string(p) + " with n=" + std::to_string(n));
  const int limit = p <= 2 ? 64 : 24;
  if (n > limit)
    throw SizeGuardExceeded("n=" + std::to_string(n) + " exceeds exact-solver limit " +
                            std::to_string(limit) + " for p=" + std::to_string(p));

  std::vector<int> comb(static_cast<size_t>(p));
  for (int i = 0; i < p; ++i) comb[i] = i;

  PMedianSolution best;
  best.objective = std::numeric_limits<double>::infinity();
  std::vector<int> assignment;
  do {
    const double obj = detail::assign_nearest(d, comb, assignment);
    if (obj < best.objective) {
      best.objective = obj;
      best.centers = comb;
      best.assignment = assignment;
    }
  } while (detail::next_combination(comb, n));
  return best;
}

/// Medoid of a member set: the member minimizing its summed distance to the
/// others, ties to the lowest row index regardless of member order.
inline int medoid(const std::vector<int>& members, const DistanceMatrix& d) {
  if (members.empty()) throw EmptyCluster("medoid of empty member set");
  int best = members[0];
  double best_sum = std::numeric_limits<double>::infinity();
  for (int m : members) {
    double sum = 0;
    for (int other : members) sum += d.at(m, other);
    if (sum < best_sum || (sum == best_sum && m < best)) {
      best_sum = sum;
      best = m;
    }
  }
  return best;
}

namespace detail {

inline Partition solution_to_partition(const PMedianSolution& sol, const FeatureMatrix& f) {
  Partition part;
  part.scene_id = f.scene_id;
  part.modality = f.modality;
  std::vector<std::vector<int>> clusters(sol.centers.size());
  for (int i = 0; i < static_cast<int>(sol.assignment.size()); ++i)
    clusters[static_cast<size_t>(sol.assignment[i])].push_back(f.utterance_ids[i]);
  for (size_t c = 0; c < clusters.size(); ++c) {
    if (clusters[c].empty()) continue;  // duplicate points can starve a center
    std::sort(clusters[c].begin(), clusters[c].end());
    part.clusters.push_back(std::move(clusters[c]));
    part.centers.push_back(f.utterance_ids[sol.centers[c]]);
  }
  return part;
}

}  // namespace detail

/// Clusters one scene's feature matrix into at most p groups. Scenes shorter
/// than p utterances use every utterance as its own center.
inline Partition cluster_scene(const FeatureMatrix& f, int p = 2) {
  const int n = f.size();
  if (n == 0) {
    Partition part;
    part.scene_id = f.scene_id;
    part.modality = f.modality;
    return part;
  }
  const DistanceMatrix d = distance_matrix(f);
  const PMedianSolution sol = pmedian_solve(d, std::min(p, n));
  return detail::solution_to_partition(sol, f);
}

/// Weighted-sum baseline: mixes the two modalities' distance matrices after
/// scaling each to unit maximum, then solves a single p-median program on the
/// blend. Both matrices must describe the same utterances in the same order.
inline Partition cluster_scene_ws(const FeatureMatrix& fa, const FeatureMatrix& fv,
                                  double alpha = 0.5, int p = 2) {
  if (fa.utterance_ids != fv.utterance_ids)
    throw OrderMismatch("audio and video feature rows describe different utterance sequences");
  const int n = fa.size();
  Partition part;
  part.scene_id = fa.scene_id;
  part.modality = Modality::fused;
  if (n == 0) return part;

  const DistanceMatrix da = distance_matrix(fa);
  const DistanceMatrix dv = distance_matrix(fv);
  const double ma = da.max_value();
  const double mv = dv.max_value();
  DistanceMatrix mix;
  mix.n = n;
  mix.d.assign(static_cast<size_t>(n) * n, 0.0);
  for (size_t k = 0; k < mix.d.size(); ++k) {
    const double a = ma > 0 ? da.d[k] / ma : 0.0;
    const double v = mv > 0 ? dv.d[k] / mv : 0.0;
    mix.d[k] = alpha * a + (1.0 - alpha) * v;
  }
  const PMedianSolution sol = pmedian_solve(mix, std::min(p, n));
  Partition out = detail::solution_to_partition(sol, fa);
  out.modality = Modality::fused;
  return out;
}

}  // namespace avdiar
