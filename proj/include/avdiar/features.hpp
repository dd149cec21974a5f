#pragma once

#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "avdiar/model.hpp"
#include "avdiar/tables.hpp"

namespace avdiar {

enum class Metric { euclidean, normalized_euclidean };

/// Per-scene utterance vectors for one modality, rows ordered by the scene's
/// utterance order, with the distance metric they are meant to be compared
/// under: plain euclidean for video overlap vectors, per-dimension z-scored
/// euclidean for audio embeddings.
struct FeatureMatrix {
  int scene_id = 0;
  Modality modality = Modality::audio;
  Metric metric = Metric::euclidean;
  int dim = 0;
  std::vector<int> utterance_ids;
  std::vector<std::vector<double>> rows;

  int size() const { return static_cast<int>(rows.size()); }
};

/// Symmetric pairwise distances with zero diagonal.
struct DistanceMatrix {
  int n = 0;
  std::vector<double> d;

  double at(int i, int j) const { return d[static_cast<size_t>(i) * n + j]; }
  double& at(int i, int j) { return d[static_cast<size_t>(i) * n + j]; }
  double max_value() const {
    double m = 0;
    for (double v : d) m = std::max(m, v);
    return m;
  }
};

namespace detail {

inline std::unordered_map<int, const Utterance*> utterance_index(
    const std::vector<Utterance>& utts) {
  std::unordered_map<int, const Utterance*> by_id;
  by_id.reserve(utts.size());
  for (const auto& u : utts) by_id.emplace(u.id, &u);
  return by_id;
}

}  // namespace detail

/// Video description of a scene's utterances: component i holds the overlap
/// in seconds between the utterance and every shot labeled i, over the full
/// episode label alphabet.
inline FeatureMatrix video_vectors(const Scene& scene, const std::vector<Shot>& shots,
                                   int label_count,
                                   const std::vector<Utterance>& utterances) {
  FeatureMatrix f;
  f.scene_id = scene.id;
  f.modality = Modality::video;
  f.metric = Metric::euclidean;
  f.dim = label_count;
  f.utterance_ids = scene.utterance_ids;
  const auto by_id = detail::utterance_index(utterances);
  for (int id : scene.utterance_ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end())
      throw MissingUtterance("utterance " + std::to_string(id));
    std::vector<double> v(static_cast<size_t>(label_count), 0.0);
    for (const auto& sh : shots) {
      if (sh.label < 0 || sh.label >= label_count) continue;
      const Millis ov = overlap_ms(it->second->span, sh.span);
      if (ov > 0) v[static_cast<size_t>(sh.label)] += to_seconds(ov);
    }
    f.rows.push_back(std::move(v));
  }
  return f;
}

/// Audio description of a scene's utterances: embedding rows selected from
/// the table in scene order.
inline FeatureMatrix audio_vectors(const Scene& scene, const EmbeddingTable& table) {
  FeatureMatrix f;
  f.scene_id = scene.id;
  f.modality = Modality::audio;
  f.metric = Metric::normalized_euclidean;
  f.dim = table.dim;
  f.utterance_ids = scene.utterance_ids;
  for (int id : scene.utterance_ids) {
    const auto it = table.vectors.find(id);
    if (it == table.vectors.end())
      throw MissingUtterance("utterance " + std::to_string(id) +
                             " absent from embedding table");
    f.rows.push_back(it->second);
  }
  return f;
}

/// Pairwise distances under the matrix's metric. The normalized euclidean
/// metric z-scores each dimension by its standard deviation over the scene's
/// own vectors (population convention); zero-variance dimensions are skipped.
inline DistanceMatrix distance_matrix(const FeatureMatrix& f) {
  const int n = f.size();
  DistanceMatrix m;
  m.n = n;
  m.d.assign(static_cast<size_t>(n) * n, 0.0);
  if (n <= 1) return m;

  std::vector<double> scale(static_cast<size_t>(f.dim), 1.0);
  if (f.metric == Metric::normalized_euclidean) {
    for (int k = 0; k < f.dim; ++k) {
      double mean = 0;
      for (const auto& row : f.rows) mean += row[k];
      mean /= n;
      double var = 0;
      for (const auto& row : f.rows) var += (row[k] - mean) * (row[k] - mean);
      var /= n;
      scale[k] = var > 0 ? 1.0 / std::sqrt(var) : 0.0;  // 0 drops the dimension
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double acc = 0;
      for (int k = 0; k < f.dim; ++k) {
        const double diff = (f.rows[i][k] - f.rows[j][k]) * scale[k];
        acc += diff * diff;
      }
      const double dist = std::sqrt(acc);
      m.at(i, j) = dist;
      m.at(j, i) = dist;
    }
  }
  return m;
}

}  // namespace avdiar
