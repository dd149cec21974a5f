#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "avdiar/image.hpp"
#include "avdiar/model.hpp"
#include "avdiar/shot_analysis.hpp"
#include "avdiar/srt.hpp"
#include "avdiar/tables.hpp"

namespace avdiar {

/// Knobs of the synthetic-episode generator. Audio vectors for a scene's two
/// speakers are drawn from spherical gaussians of unit within-cluster
/// standard deviation whose centers sit `separation` apart; `p_async` is the
/// chance an utterance is voiced over the other speaker's shot (video goes
/// wrong, audio does not); `p_outlier` the chance an utterance's audio vector
/// is drawn far from both centers (audio degrades, video does not);
/// `single_speaker_prob` the chance a scene's shot alternation is really one
/// person (over-segmented video).
struct GenConfig {
  std::uint32_t seed = 1;
  int scenes = 8;
  int utt_min = 6;
  int utt_max = 12;
  double separation = 2.0;
  double p_async = 0.0;
  double p_outlier = 0.0;
  double single_speaker_prob = 0.0;
  double outlier_lo = 1.0;  // outlier distance from the center midpoint,
  double outlier_hi = 2.0;  // in units of `separation`
  int dim = 20;
  int fps = 25;
  bool with_frames = false;
  int frame_width = 60;
  int frame_height = 50;
};

/// A generated episode plus its ground truth.
struct Episode {
  std::vector<Shot> shots;  // contiguous, labeled
  std::vector<SubtitleEntry> subtitles;
  std::vector<Utterance> utterances;  // ref_speaker set
  EmbeddingTable embeddings;
  std::map<int, std::string> reference;
  std::vector<Scene> planted_scenes;
  std::vector<int> cut_frames;                     // first frame of every shot but the first
  std::vector<std::pair<int, int>> similar_pairs;  // same-label shot pairs, (earlier, later)
  std::vector<RgbImage> frames;                    // filled when cfg.with_frames
  int label_count = 0;
};

namespace detail {

using SolidColor = std::array<std::uint8_t, 3>;

/// Solid colors that survive the byte-level HSV round trip inside one
/// histogram bin each, so equal labels compare as identical frames and
/// different labels as uncorrelated ones.
inline std::vector<SolidColor> distinct_bin_palette(const HistogramGeometry& geom,
                                                    int needed) {
  std::vector<SolidColor> palette;
  std::vector<char> bin_taken(static_cast<size_t>(geom.h_bins) * geom.s_bins * geom.v_bins, 0);
  for (int vb = geom.v_bins - 1; vb >= 1 && static_cast<int>(palette.size()) < needed; --vb) {
    for (int sb = geom.s_bins - 1; sb >= 1 && static_cast<int>(palette.size()) < needed; --sb) {
      for (int hb = 0; hb < geom.h_bins && static_cast<int>(palette.size()) < needed; ++hb) {
        SolidColor px;
        hsv_to_rgb((hb + 0.5) * 360.0 / geom.h_bins, (sb + 0.5) / geom.s_bins,
                   (vb + 0.5) / geom.v_bins, px[0], px[1], px[2]);
        const Hsv back = rgb_to_hsv(px[0], px[1], px[2]);
        // Bin exactly as frame_histogram does, expression for expression, so
        // the uniqueness check holds for the histograms actually computed.
        const int hb2 = std::min(geom.h_bins - 1,
                                 static_cast<int>(back.h / 360.0 * geom.h_bins));
        const int sb2 = std::min(geom.s_bins - 1, static_cast<int>(back.s * geom.s_bins));
        const int vb2 = std::min(geom.v_bins - 1, static_cast<int>(back.v * geom.v_bins));
        const size_t bin =
            (static_cast<size_t>(hb2) * geom.s_bins + sb2) * geom.v_bins + vb2;
        if (bin_taken[bin]) continue;
        bin_taken[bin] = 1;
        palette.push_back(px);
      }
    }
  }
  return palette;
}

inline std::vector<double> random_unit_vector(std::mt19937& rng, int dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(static_cast<size_t>(dim));
  double norm = 0;
  do {
    norm = 0;
    for (auto& x : v) {
      x = gauss(rng);
      norm += x * x;
    }
  } while (norm == 0);
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

}  // namespace detail

/// Deterministically generates one episode: scenes of two alternating shot
/// labels (odd run length, one utterance per shot) separated by filler shots
/// with fresh labels and no speech.
inline Episode generate_episode(const GenConfig& cfg) {
  std::mt19937 rng(cfg.seed);
  std::uniform_int_distribution<int> utt_count_dist(cfg.utt_min, cfg.utt_max);
  std::uniform_int_distribution<int> shot_frames_dist(20, 50);
  std::uniform_int_distribution<int> filler_count_dist(1, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Episode ep;
  ep.embeddings.dim = cfg.dim;
  const Millis frame_ms = 1000 / cfg.fps;  // fps values dividing 1000 keep the grid exact

  int next_label = 0;
  int frame_cursor = 0;
  const auto push_shot = [&](int label, int frames) {
    Shot s;
    s.index = static_cast<int>(ep.shots.size());
    s.label = label;
    s.frame_first = frame_cursor;
    s.frame_last = frame_cursor + frames - 1;
    s.span.start_ms = frame_cursor * frame_ms;
    s.span.end_ms = (frame_cursor + frames) * frame_ms;
    frame_cursor += frames;
    ep.shots.push_back(s);
  };
  const auto push_fillers = [&] {
    const int count = filler_count_dist(rng);
    for (int f = 0; f < count; ++f) push_shot(next_label++, shot_frames_dist(rng));
  };

  push_fillers();
  for (int sc = 0; sc < cfg.scenes; ++sc) {
    int utt_count = utt_count_dist(rng);
    utt_count |= 1;  // the alternation l1(l2 l1)+ has odd length
    if (utt_count < 3) utt_count = 3;
    if (utt_count > cfg.utt_max) utt_count -= 2;

    const int l1 = next_label++;
    const int l2 = next_label++;
    const bool single_speaker = unit(rng) < cfg.single_speaker_prob;
    const std::string spk_a = "s" + std::to_string(sc) + "a";
    const std::string spk_b = single_speaker ? spk_a : "s" + std::to_string(sc) + "b";

    // Two audio centers `separation` apart on a random axis (unit within-
    // cluster std); a single-speaker scene uses one center for every line.
    const std::vector<double> axis = detail::random_unit_vector(rng, cfg.dim);
    std::vector<double> center_a(static_cast<size_t>(cfg.dim)),
        center_b(static_cast<size_t>(cfg.dim)), midpoint(static_cast<size_t>(cfg.dim));
    for (int k = 0; k < cfg.dim; ++k) {
      center_a[k] = -axis[k] * cfg.separation / 2;
      center_b[k] = axis[k] * cfg.separation / 2;
      midpoint[k] = 0;
    }

    Scene scene;
    scene.id = static_cast<int>(ep.planted_scenes.size());
    scene.pattern = {l1, l2};
    const int first_shot = static_cast<int>(ep.shots.size());

    for (int u = 0; u < utt_count; ++u) {
      const int label = u % 2 == 0 ? l1 : l2;
      const int frames = shot_frames_dist(rng);
      push_shot(label, frames);
      const Shot& shot = ep.shots.back();

      // Utterance strictly inside the shot, at least 300 ms long.
      const Millis shot_len = shot.span.duration_ms();
      std::uniform_int_distribution<Millis> lead_dist(40, std::max<Millis>(40, shot_len / 4));
      const Millis lead = lead_dist(rng);
      std::uniform_int_distribution<Millis> tail_dist(40, std::max<Millis>(40, shot_len / 4));
      Millis tail = tail_dist(rng);
      if (shot_len - lead - tail < 300) tail = std::max<Millis>(0, shot_len - lead - 300);

      Utterance utt;
      utt.id = static_cast<int>(ep.utterances.size());
      utt.span.start_ms = shot.span.start_ms + lead;
      utt.span.end_ms = shot.span.end_ms - tail;

      const bool shot_is_a = label == l1;
      bool speaks_a = single_speaker ? true : shot_is_a;
      if (!single_speaker && unit(rng) < cfg.p_async) speaks_a = !speaks_a;  // voice-over
      const std::string& speaker = speaks_a ? spk_a : spk_b;
      utt.ref_speaker = speaker;
      ep.reference[utt.id] = speaker;

      std::vector<double> vec(static_cast<size_t>(cfg.dim));
      if (unit(rng) < cfg.p_outlier) {
        const std::vector<double> dir = detail::random_unit_vector(rng, cfg.dim);
        std::uniform_real_distribution<double> radius_dist(cfg.outlier_lo * cfg.separation,
                                                           cfg.outlier_hi * cfg.separation);
        const double radius = radius_dist(rng);
        for (int k = 0; k < cfg.dim; ++k)
          vec[k] = midpoint[k] + dir[k] * radius + 0.25 * gauss(rng);
      } else {
        const std::vector<double>& center = speaks_a ? center_a : center_b;
        for (int k = 0; k < cfg.dim; ++k) vec[k] = center[k] + gauss(rng);
      }
      ep.embeddings.vectors.emplace(utt.id, std::move(vec));

      SubtitleEntry cue;
      cue.index = utt.id + 1;
      cue.span = utt.span;
      cue.lines = {"line " + std::to_string(utt.id)};
      ep.subtitles.push_back(std::move(cue));

      scene.utterance_ids.push_back(utt.id);
      ep.utterances.push_back(std::move(utt));
    }

    const int last_shot = static_cast<int>(ep.shots.size()) - 1;
    scene.intervals.push_back(
        {ep.shots[first_shot].span.start_ms, ep.shots[last_shot].span.end_ms});
    ep.planted_scenes.push_back(std::move(scene));
    push_fillers();
  }
  ep.label_count = next_label;

  for (size_t i = 1; i < ep.shots.size(); ++i) ep.cut_frames.push_back(ep.shots[i].frame_first);
  // Same (q, c) enumeration order as the similarity detector, so detector
  // output can be compared against this ground truth verbatim.
  for (size_t c = 1; c < ep.shots.size(); ++c)
    for (size_t q = 0; q < c; ++q)
      if (ep.shots[q].label == ep.shots[c].label)
        ep.similar_pairs.emplace_back(static_cast<int>(q), static_cast<int>(c));

  if (cfg.with_frames) {
    const HistogramGeometry geom;
    const std::vector<detail::SolidColor> palette =
        detail::distinct_bin_palette(geom, ep.label_count);
    if (static_cast<int>(palette.size()) < ep.label_count)
      throw SizeGuardExceeded("label count " + std::to_string(ep.label_count) +
                              " exceeds the distinct-color palette (" +
                              std::to_string(palette.size()) + ")");
    ep.frames.reserve(static_cast<size_t>(frame_cursor));
    for (const auto& shot : ep.shots) {
      const detail::SolidColor& px = palette[shot.label];
      const RgbImage frame =
          RgbImage::solid(cfg.frame_width, cfg.frame_height, px[0], px[1], px[2]);
      for (int f = shot.frame_first; f <= shot.frame_last; ++f) ep.frames.push_back(frame);
    }
  }
  return ep;
}

/// Writes an episode to disk in the exact formats the ingest layer consumes:
/// episode.srt, shots.csv, ivectors.csv, speakers.csv, and (when frames were
/// generated) frames/NNNNNN.ppm.
inline void emit_corpus(const Episode& ep, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  detail::write_file((fs::path(dir) / "episode.srt").string(), serialize_srt(ep.subtitles));
  save_shot_table(ep.shots, (fs::path(dir) / "shots.csv").string());
  save_embeddings(ep.embeddings, (fs::path(dir) / "ivectors.csv").string());
  save_reference(ep.reference, (fs::path(dir) / "speakers.csv").string());
  if (!ep.frames.empty()) {
    const fs::path frame_dir = fs::path(dir) / "frames";
    fs::create_directories(frame_dir);
    char name[32];
    for (size_t i = 0; i < ep.frames.size(); ++i) {
      std::snprintf(name, sizeof(name), "%06zu.ppm", i);
      write_ppm(ep.frames[i], (frame_dir / name).string());
    }
  }
}

}  // namespace avdiar
