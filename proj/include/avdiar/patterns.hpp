#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "avdiar/model.hpp"

namespace avdiar {

/// Inclusive shot-index range [first, last].
struct ShotRun {
  int first = 0;
  int last = 0;

  friend bool operator==(const ShotRun&, const ShotRun&) = default;
};

/// Where a label pair alternates in the sequence: full alternation runs of
/// the form l1 l2 l1 (l2 l1)*, plus isolated pair expressions — maximal
/// stretches over {l1, l2} of length >= 2 outside the full alternations.
struct PatternMatch {
  std::pair<ShotLabel, ShotLabel> pair{-1, -1};
  std::vector<ShotRun> match_runs;
  std::vector<ShotRun> isolated_runs;

  std::vector<ShotRun> all_runs() const {
    std::vector<ShotRun> runs = match_runs;
    runs.insert(runs.end(), isolated_runs.begin(), isolated_runs.end());
    std::sort(runs.begin(), runs.end(),
              [](const ShotRun& a, const ShotRun& b) { return a.first < b.first; });
    return runs;
  }
};

namespace detail {

// Index of the first l1 l2 l1 triple, or -1 when the pair never alternates.
inline int first_alternation(const std::vector<ShotLabel>& s, ShotLabel l1,
                             ShotLabel l2) {
  for (size_t i = 0; i + 2 < s.size(); ++i)
    if (s[i] == l1 && s[i + 1] == l2 && s[i + 2] == l1) return static_cast<int>(i);
  return -1;
}

}  // namespace detail

/// Label pairs that alternate somewhere in the sequence. The two
/// orientations of a pair describe the same dialogue; the one whose
/// alternation appears first is kept, so each unordered pair occurs once.
/// Pairs are returned by first occurrence (pattern seniority).
inline std::vector<std::pair<ShotLabel, ShotLabel>> extract_patterns(
    const std::vector<ShotLabel>& s) {
  std::map<std::pair<ShotLabel, ShotLabel>, int> first_at;
  for (size_t i = 0; i + 2 < s.size(); ++i) {
    if (s[i] != s[i + 2] || s[i] == s[i + 1]) continue;
    const auto key = std::make_pair(s[i], s[i + 1]);
    if (!first_at.count(key)) first_at[key] = static_cast<int>(i);
  }
  std::vector<std::pair<ShotLabel, ShotLabel>> result;
  for (const auto& [pair, at] : first_at) {
    const auto rev = std::make_pair(pair.second, pair.first);
    const auto it = first_at.find(rev);
    if (it != first_at.end() && it->second < at) continue;  // reversed form came first
    result.push_back(pair);
  }
  std::sort(result.begin(), result.end(),
            [&](const auto& a, const auto& b) { return first_at[a] < first_at[b]; });
  return result;
}

/// Runs of one pattern pair. Full alternation runs are taken greedily left
/// to right and maximally extended; isolated pair expressions are collected
/// from what remains.
inline PatternMatch pattern_runs(const std::vector<ShotLabel>& s,
                                 std::pair<ShotLabel, ShotLabel> pair) {
  const auto patterns = extract_patterns(s);
  if (std::find(patterns.begin(), patterns.end(), pair) == patterns.end())
    throw PairNotInPatternSet("(" + std::to_string(pair.first) + "," +
                              std::to_string(pair.second) + ")");
  const ShotLabel l1 = pair.first, l2 = pair.second;
  PatternMatch m;
  m.pair = pair;
  const int n = static_cast<int>(s.size());
  std::vector<bool> in_match(s.size(), false);
  for (int i = 0; i < n;) {
    if (i + 2 < n && s[i] == l1 && s[i + 1] == l2 && s[i + 2] == l1) {
      int j = i + 2;
      while (j + 2 < n && s[j + 1] == l2 && s[j + 2] == l1) j += 2;
      m.match_runs.push_back(ShotRun{i, j});
      for (int k = i; k <= j; ++k) in_match[k] = true;
      i = j + 1;
    } else {
      ++i;
    }
  }
  for (int i = 0; i < n;) {
    if (!in_match[i] && (s[i] == l1 || s[i] == l2)) {
      int j = i;
      while (j + 1 < n && !in_match[j + 1] && (s[j + 1] == l1 || s[j + 1] == l2)) ++j;
      if (j > i) m.isolated_runs.push_back(ShotRun{i, j});
      i = j + 1;
    } else {
      ++i;
    }
  }
  return m;
}

/// One scene per pattern pair: intervals are the time spans of the pair's
/// runs; an utterance belongs to a scene when at least min_cover of its
/// duration falls inside the scene intervals. A candidate for several scenes
/// goes to the one with the larger overlap, then to the senior pattern.
inline std::vector<Scene> build_scenes(const std::vector<Shot>& shots,
                                       const std::vector<std::pair<ShotLabel, ShotLabel>>& patterns,
                                       const std::vector<Utterance>& utterances,
                                       double min_cover = 0.5) {
  std::vector<ShotLabel> labels;
  labels.reserve(shots.size());
  for (const auto& sh : shots) labels.push_back(sh.label);

  std::vector<Scene> scenes;
  for (size_t k = 0; k < patterns.size(); ++k) {
    Scene sc;
    sc.id = static_cast<int>(k);
    sc.pattern = patterns[k];
    for (const auto& run : pattern_runs(labels, patterns[k]).all_runs())
      sc.intervals.push_back(
          TimeSpan{shots[run.first].span.start_ms, shots[run.last].span.end_ms});
    scenes.push_back(std::move(sc));
  }

  for (const auto& u : utterances) {
    int best = -1;
    Millis best_ov = 0;
    for (const auto& sc : scenes) {
      Millis ov = 0;
      for (const auto& iv : sc.intervals) ov += overlap_ms(u.span, iv);
      if (static_cast<double>(ov) <
          min_cover * static_cast<double>(u.span.duration_ms()))
        continue;
      if (ov > best_ov) {
        best_ov = ov;
        best = sc.id;
      }
    }
    if (best >= 0) scenes[best].utterance_ids.push_back(u.id);
  }
  for (auto& sc : scenes) std::sort(sc.utterance_ids.begin(), sc.utterance_ids.end());
  return scenes;
}

/// Descriptive statistics over the detected scenes.
struct SceneStats {
  int scene_count = 0;
  double mean_speech_s = 0;        // covered speech per scene
  double total_coverage_pct = 0;   // covered speech / all speech
  std::optional<double> mean_speakers;
  std::optional<double> std_speakers;
};

inline SceneStats scene_stats(const std::vector<Scene>& scenes,
                              const std::vector<Utterance>& utterances,
                              const std::map<int, std::string>* reference = nullptr) {
  SceneStats st;
  st.scene_count = static_cast<int>(scenes.size());
  std::map<int, Millis> dur;
  Millis total = 0;
  for (const auto& u : utterances) {
    dur[u.id] = u.span.duration_ms();
    total += u.span.duration_ms();
  }
  Millis covered = 0;
  std::vector<double> speakers_per_scene;
  for (const auto& sc : scenes) {
    Millis scene_ms = 0;
    for (int id : sc.utterance_ids) scene_ms += dur.at(id);
    covered += scene_ms;
    if (reference) {
      std::vector<std::string> spk;
      for (int id : sc.utterance_ids) {
        const auto it = reference->find(id);
        if (it != reference->end()) spk.push_back(it->second);
      }
      std::sort(spk.begin(), spk.end());
      spk.erase(std::unique(spk.begin(), spk.end()), spk.end());
      speakers_per_scene.push_back(static_cast<double>(spk.size()));
    }
  }
  if (!scenes.empty())
    st.mean_speech_s = to_seconds(covered) / static_cast<double>(scenes.size());
  if (total > 0)
    st.total_coverage_pct = 100.0 * static_cast<double>(covered) / static_cast<double>(total);
  if (reference && !speakers_per_scene.empty()) {
    double mean = 0;
    for (double v : speakers_per_scene) mean += v;
    mean /= static_cast<double>(speakers_per_scene.size());
    double var = 0;
    for (double v : speakers_per_scene) var += (v - mean) * (v - mean);
    var /= static_cast<double>(speakers_per_scene.size());
    st.mean_speakers = mean;
    st.std_speakers = std::sqrt(var);
  }
  return st;
}

}  // namespace avdiar
