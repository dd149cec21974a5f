#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "avdiar/errors.hpp"

namespace avdiar {

/// Milliseconds since episode start. All temporal bookkeeping is integral so
/// that duration sums (DER weights, match weights) are exact and reports are
/// reproducible bit-for-bit.
using Millis = std::int64_t;

inline double to_seconds(Millis ms) { return static_cast<double>(ms) / 1000.0; }

/// Half-open-ish time interval [start, end], end >= start.
struct TimeSpan {
  Millis start_ms = 0;
  Millis end_ms = 0;

  Millis duration_ms() const { return end_ms - start_ms; }
  double duration_s() const { return to_seconds(duration_ms()); }
  bool valid() const { return end_ms >= start_ms; }

  friend bool operator==(const TimeSpan&, const TimeSpan&) = default;
};

/// Overlap duration of two spans, clamped at zero for disjoint spans.
inline Millis overlap_ms(const TimeSpan& a, const TimeSpan& b) {
  const Millis lo = std::max(a.start_ms, b.start_ms);
  const Millis hi = std::min(a.end_ms, b.end_ms);
  return hi > lo ? hi - lo : 0;
}

inline double overlap_s(const TimeSpan& a, const TimeSpan& b) {
  return to_seconds(overlap_ms(a, b));
}

/// A single-speaker spoken segment, the atomic clustering instance.
/// Ids are unique within an episode; ref_speaker is present only on
/// annotated data.
struct Utterance {
  int id = 0;
  TimeSpan span;
  std::optional<std::string> ref_speaker;

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

/// Shot label: equivalence class id of visually similar shots. Labels are
/// small integers assigned in order of first occurrence; -1 means unlabeled.
using ShotLabel = int;

/// Maximal frame run from one camera take. Shots tile the episode timeline:
/// consecutive shots share a boundary. frame_first/frame_last are set when
/// shots come from frame-level detection, -1 when loaded from a table.
struct Shot {
  int index = 0;
  TimeSpan span;
  std::int64_t frame_first = -1;
  std::int64_t frame_last = -1;
  ShotLabel label = -1;

  friend bool operator==(const Shot&, const Shot&) = default;
};

/// A detected two-alternating-shot dialogue: the label pair, the time
/// intervals of its shot runs and the utterances it covers.
struct Scene {
  int id = 0;
  std::pair<ShotLabel, ShotLabel> pattern{-1, -1};
  std::vector<TimeSpan> intervals;       // sorted, non-overlapping
  std::vector<int> utterance_ids;        // sorted ascending

  Millis total_interval_ms() const {
    Millis t = 0;
    for (const auto& iv : intervals) t += iv.duration_ms();
    return t;
  }
};

enum class Modality { audio, video, fused };

inline const char* to_string(Modality m) {
  switch (m) {
    case Modality::audio: return "audio";
    case Modality::video: return "video";
    case Modality::fused: return "fused";
  }
  return "?";
}

/// Assignment of (a subset of) a scene's utterances to clusters. Fused
/// partial partitions may omit discarded utterances. When centers are
/// present, centers[k] is a member of clusters[k].
struct Partition {
  int scene_id = 0;
  Modality modality = Modality::audio;
  std::vector<std::vector<int>> clusters;  // utterance ids, each sorted
  std::vector<int> centers;                // empty, or one id per cluster

  std::vector<int> universe() const {
    std::vector<int> ids;
    for (const auto& c : clusters) ids.insert(ids.end(), c.begin(), c.end());
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  bool clusters_disjoint() const {
    auto ids = universe();
    return std::adjacent_find(ids.begin(), ids.end()) == ids.end();
  }
};

}  // namespace avdiar
