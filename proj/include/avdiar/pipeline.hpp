#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "avdiar/evaluation.hpp"
#include "avdiar/features.hpp"
#include "avdiar/fusion.hpp"
#include "avdiar/model.hpp"
#include "avdiar/patterns.hpp"
#include "avdiar/pmedian.hpp"
#include "avdiar/srt.hpp"
#include "avdiar/tables.hpp"

namespace avdiar {

struct PipelineConfig {
  std::string srt_path;
  std::string shots_path;
  std::string embeddings_path;
  std::string reference_path;  // optional; without it nothing is scored
  std::string out_dir = ".";
  double theta_cut = 0.5;
  double theta_sim = 0.7;
  double alpha = 0.5;
  double min_cover = 0.5;
  int fps = 25;
  int p = 2;
  int jobs = 1;
  std::uint32_t seed = 1;
  std::string systems = "audio,video,oracle,om-ra,om+ra,ws";
};

/// Everything computed for one scene: the per-modality partitions, the fusion
/// outcome, and (when a reference is available) one score per system.
struct SceneSystems {
  Scene scene;
  Millis speech_ms = 0;
  Partition audio, video, ws;
  FusionResult fusion;
  bool excluded = false;  // nothing to score (no utterances)
  bool scored = false;
  SceneScore s_audio, s_video, s_oracle, s_omra, s_ompra, s_ws;
};

struct EpisodeResult {
  std::vector<Shot> shots;
  std::vector<Utterance> utterances;
  int label_count = 0;
  bool have_reference = false;
  std::vector<SceneSystems> scenes;

  int scored_scenes = 0;
  int excluded_scenes = 0;
  int degenerate_scenes = 0;
  Millis scored_speech_ms = 0;
  double show_audio = 0, show_video = 0, show_oracle = 0;
  double show_omra = 0, show_ompra = 0, show_ws = 0;
  double omra_coverage_pct = 0;
};

namespace detail {

inline SceneSystems diarize_scene(const Scene& scene, const std::vector<Shot>& shots,
                                  int label_count, const std::vector<Utterance>& utterances,
                                  const EmbeddingTable& embeddings,
                                  const std::map<int, std::string>* reference,
                                  const PipelineConfig& cfg) {
  SceneSystems out;
  out.scene = scene;
  const auto dur = duration_index(utterances);
  for (int id : scene.utterance_ids) out.speech_ms += dur.at(id);
  if (scene.utterance_ids.empty()) {
    out.excluded = true;
    return out;
  }

  const FeatureMatrix fa = audio_vectors(scene, embeddings);
  const FeatureMatrix fv = video_vectors(scene, shots, label_count, utterances);
  out.audio = cluster_scene(fa, cfg.p);
  out.video = cluster_scene(fv, cfg.p);
  out.ws = cluster_scene_ws(fa, fv, cfg.alpha, cfg.p);
  out.fusion = fuse_scene(out.audio, out.video, fa, utterances);

  if (reference != nullptr) {
    out.s_audio = der_scene(out.audio, *reference, utterances);
    out.s_video = der_scene(out.video, *reference, utterances);
    out.s_oracle = der_oracle(out.audio, out.video, *reference, utterances);
    out.s_omra = der_scene(out.fusion.kept, *reference, utterances);
    out.s_ompra = der_scene(out.fusion.final_partition, *reference, utterances);
    out.s_ws = der_scene(out.ws, *reference, utterances);
    out.scored = true;
  }
  return out;
}

}  // namespace detail

/// Runs the full per-scene pipeline over already-ingested inputs. Scenes are
/// processed independently (in parallel when cfg.jobs > 1, results landing in
/// per-scene slots) and aggregated sequentially, so the outcome does not
/// depend on the job count.
inline EpisodeResult run_diarize(const std::vector<Shot>& shots,
                                 const std::vector<Utterance>& utterances,
                                 const EmbeddingTable& embeddings,
                                 const std::map<int, std::string>* reference,
                                 const PipelineConfig& cfg) {
  EpisodeResult result;
  result.shots = shots;
  result.utterances = utterances;
  result.have_reference = reference != nullptr;
  for (const auto& s : shots) result.label_count = std::max(result.label_count, s.label + 1);

  std::vector<int> labels;
  labels.reserve(shots.size());
  for (const auto& s : shots) labels.push_back(s.label);
  const std::vector<std::pair<int, int>> patterns = extract_patterns(labels);
  const std::vector<Scene> scenes = build_scenes(shots, patterns, utterances, cfg.min_cover);

  result.scenes.resize(scenes.size());
  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1 || scenes.size() <= 1) {
    for (size_t i = 0; i < scenes.size(); ++i)
      result.scenes[i] = detail::diarize_scene(scenes[i], shots, result.label_count,
                                               utterances, embeddings, reference, cfg);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    const size_t workers = std::min<size_t>(jobs, scenes.size());
    std::vector<std::exception_ptr> errors(workers);
    for (size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (size_t i = next.fetch_add(1); i < scenes.size(); i = next.fetch_add(1))
            result.scenes[i] = detail::diarize_scene(scenes[i], shots, result.label_count,
                                                     utterances, embeddings, reference, cfg);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  Millis err_a = 0, err_v = 0, err_o = 0, err_kept = 0, err_final = 0, err_ws = 0;
  Millis scored_ms = 0, kept_ms = 0;
  for (const auto& s : result.scenes) {
    if (s.excluded) {
      ++result.excluded_scenes;
      continue;
    }
    if (s.fusion.degenerate) ++result.degenerate_scenes;
    if (!s.scored) continue;
    ++result.scored_scenes;
    scored_ms += s.speech_ms;
    err_a += s.s_audio.err_ms;
    err_v += s.s_video.err_ms;
    err_o += s.s_oracle.err_ms;
    err_ws += s.s_ws.err_ms;
    err_final += s.s_ompra.err_ms;
    err_kept += s.s_omra.err_ms;
    kept_ms += s.s_omra.ref_ms;
  }
  result.scored_speech_ms = scored_ms;
  if (scored_ms > 0) {
    const double total = static_cast<double>(scored_ms);
    result.show_audio = err_a / total;
    result.show_video = err_v / total;
    result.show_oracle = err_o / total;
    result.show_ompra = err_final / total;
    result.show_ws = err_ws / total;
    result.omra_coverage_pct = 100.0 * static_cast<double>(kept_ms) / total;
  }
  if (kept_ms > 0) result.show_omra = static_cast<double>(err_kept) / kept_ms;
  return result;
}

/// Convenience ingest-and-run: loads subtitles, labeled shots, embeddings,
/// and the optional reference from cfg's paths.
inline EpisodeResult run_diarize_files(const PipelineConfig& cfg) {
  const std::vector<SubtitleEntry> subs = parse_srt(detail::read_file(cfg.srt_path));
  const std::vector<Utterance> utterances = subtitles_to_utterances(subs);
  const std::vector<Shot> shots = load_shot_table(cfg.shots_path);
  const EmbeddingTable embeddings = load_embeddings(cfg.embeddings_path);
  std::map<int, std::string> reference;
  if (!cfg.reference_path.empty()) {
    std::set<int> ids;
    for (const auto& u : utterances) ids.insert(u.id);
    reference = load_reference(cfg.reference_path, ids);
  }
  return run_diarize(shots, utterances, embeddings,
                     cfg.reference_path.empty() ? nullptr : &reference, cfg);
}

namespace detail {

inline std::set<std::string> system_set(const std::string& csv) {
  std::set<std::string> out;
  std::string cur;
  for (char c : csv + ",") {
    if (c == ',') {
      if (!cur.empty()) out.insert(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  return out;
}

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

inline std::string join_ids(const std::vector<int>& ids, char sep = ' ') {
  std::string out;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) out.push_back(sep);
    out += std::to_string(ids[i]);
  }
  return out;
}

inline std::string partition_text(const Partition& p) {
  std::string out;
  for (size_t c = 0; c < p.clusters.size(); ++c) {
    if (c) out.push_back(' ');
    out += "{" + join_ids(p.clusters[c]) + "}";
  }
  if (out.empty()) out = "{}";
  return out;
}

}  // namespace detail

/// Writes report.txt (table with the six system columns), report.kv
/// (machine-readable key=value, DERs as fractions), scenes.csv, and one
/// trace_scene_<id>.txt per scene. Identical results produce byte-identical
/// files.
inline void write_reports(const EpisodeResult& r, const PipelineConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const std::set<std::string> systems = detail::system_set(cfg.systems);
  const bool scored = r.scored_scenes > 0;

  // ---- report.txt ----
  {
    std::ostringstream os;
    os << "two-character dialogue diarization\n";
    os << "scenes " << r.scenes.size() << "  scored " << r.scored_scenes << "  excluded "
       << r.excluded_scenes << "  degenerate " << r.degenerate_scenes << "  speech_s "
       << detail::fmt("%.2f", to_seconds(r.scored_speech_ms)) << "\n\n";
    if (scored) {
      os << "scene  speech_s";
      if (systems.count("audio")) os << "    audio";
      if (systems.count("video")) os << "    video";
      if (systems.count("oracle")) os << "   oracle";
      if (systems.count("om-ra")) os << "   om-ra(coverage%)";
      if (systems.count("om+ra")) os << "    om+ra";
      if (systems.count("ws")) os << "       ws";
      os << "  flags\n";
      const auto row = [&](const std::string& name, double speech_s, double a, double v,
                           double o, double omra, double cov, double ompra, double ws,
                           const std::string& flags) {
        char head[32];
        std::snprintf(head, sizeof(head), "%5s  %8.2f", name.c_str(), speech_s);
        os << head;
        if (systems.count("audio")) os << detail::fmt("  %7.2f", a);
        if (systems.count("video")) os << detail::fmt("  %7.2f", v);
        if (systems.count("oracle")) os << detail::fmt("  %7.2f", o);
        if (systems.count("om-ra"))
          os << detail::fmt("  %7.2f", omra) << " (" << detail::fmt("%5.1f", cov) << "%)";
        if (systems.count("om+ra")) os << detail::fmt("  %7.2f", ompra);
        if (systems.count("ws")) os << detail::fmt("  %7.2f", ws);
        os << "  " << flags << "\n";
      };
      for (const auto& s : r.scenes) {
        if (s.excluded || !s.scored) continue;
        std::string flags = s.fusion.degenerate ? "degenerate" : "-";
        const double cov =
            s.speech_ms > 0 ? 100.0 * static_cast<double>(s.s_omra.ref_ms) / s.speech_ms : 100.0;
        row(std::to_string(s.scene.id), to_seconds(s.speech_ms), 100 * s.s_audio.der,
            100 * s.s_video.der, 100 * s.s_oracle.der, 100 * s.s_omra.der, cov,
            100 * s.s_ompra.der, 100 * s.s_ws.der, flags);
      }
      row("show", to_seconds(r.scored_speech_ms), 100 * r.show_audio, 100 * r.show_video,
          100 * r.show_oracle, 100 * r.show_omra, r.omra_coverage_pct, 100 * r.show_ompra,
          100 * r.show_ws, "-");
    } else {
      os << "no reference provided; nothing scored\n";
      for (const auto& s : r.scenes) {
        os << "scene " << s.scene.id << "  utterances " << s.scene.utterance_ids.size()
           << "  speech_s " << detail::fmt("%.2f", to_seconds(s.speech_ms)) << "  fused "
           << detail::partition_text(s.fusion.final_partition)
           << (s.fusion.degenerate ? "  degenerate" : "") << "\n";
      }
    }
    for (const auto& s : r.scenes)
      if (s.excluded) os << "scene " << s.scene.id << " excluded: no utterances\n";
    detail::write_file((fs::path(cfg.out_dir) / "report.txt").string(), os.str());
  }

  // ---- report.kv ----
  {
    std::ostringstream os;
    os << "scenes=" << r.scenes.size() << "\n";
    os << "scored_scenes=" << r.scored_scenes << "\n";
    os << "excluded_scenes=" << r.excluded_scenes << "\n";
    os << "degenerate_scenes=" << r.degenerate_scenes << "\n";
    os << "scored_speech_ms=" << r.scored_speech_ms << "\n";
    if (scored) {
      if (systems.count("audio")) os << "show.audio.der=" << detail::fmt("%.6f", r.show_audio) << "\n";
      if (systems.count("video")) os << "show.video.der=" << detail::fmt("%.6f", r.show_video) << "\n";
      if (systems.count("oracle"))
        os << "show.oracle.der=" << detail::fmt("%.6f", r.show_oracle) << "\n";
      if (systems.count("om-ra")) {
        os << "show.om-ra.der=" << detail::fmt("%.6f", r.show_omra) << "\n";
        os << "show.om-ra.coverage_pct=" << detail::fmt("%.4f", r.omra_coverage_pct) << "\n";
      }
      if (systems.count("om+ra")) os << "show.om+ra.der=" << detail::fmt("%.6f", r.show_ompra) << "\n";
      if (systems.count("ws")) os << "show.ws.der=" << detail::fmt("%.6f", r.show_ws) << "\n";
    }
    for (const auto& s : r.scenes) {
      const std::string key = "scene." + std::to_string(s.scene.id);
      os << key << ".utterances=" << s.scene.utterance_ids.size() << "\n";
      os << key << ".speech_ms=" << s.speech_ms << "\n";
      if (s.excluded) {
        os << key << ".excluded=1\n";
        continue;
      }
      os << key << ".degenerate=" << (s.fusion.degenerate ? 1 : 0) << "\n";
      if (!s.scored) continue;
      if (systems.count("audio"))
        os << key << ".audio.der=" << detail::fmt("%.6f", s.s_audio.der) << "\n";
      if (systems.count("video"))
        os << key << ".video.der=" << detail::fmt("%.6f", s.s_video.der) << "\n";
      if (systems.count("oracle"))
        os << key << ".oracle.der=" << detail::fmt("%.6f", s.s_oracle.der) << "\n";
      if (systems.count("om-ra")) {
        os << key << ".om-ra.der=" << detail::fmt("%.6f", s.s_omra.der) << "\n";
        os << key << ".om-ra.kept_ms=" << s.s_omra.ref_ms << "\n";
      }
      if (systems.count("om+ra"))
        os << key << ".om+ra.der=" << detail::fmt("%.6f", s.s_ompra.der) << "\n";
      if (systems.count("ws")) os << key << ".ws.der=" << detail::fmt("%.6f", s.s_ws.der) << "\n";
    }
    detail::write_file((fs::path(cfg.out_dir) / "report.kv").string(), os.str());
  }

  // ---- scenes.csv ----
  {
    std::ostringstream os;
    os << "scene_id,label1,label2,intervals,utterances,speech_ms\n";
    for (const auto& s : r.scenes) {
      os << s.scene.id << "," << s.scene.pattern.first << "," << s.scene.pattern.second << ",";
      for (size_t i = 0; i < s.scene.intervals.size(); ++i) {
        if (i) os << ";";
        os << s.scene.intervals[i].start_ms << "-" << s.scene.intervals[i].end_ms;
      }
      os << "," << detail::join_ids(s.scene.utterance_ids, ';') << "," << s.speech_ms << "\n";
    }
    detail::write_file((fs::path(cfg.out_dir) / "scenes.csv").string(), os.str());
  }

  // ---- per-scene traces ----
  for (const auto& s : r.scenes) {
    std::ostringstream os;
    os << "scene " << s.scene.id << "\n";
    os << "pattern " << s.scene.pattern.first << " " << s.scene.pattern.second << "\n";
    os << "intervals";
    for (const auto& iv : s.scene.intervals) os << " " << iv.start_ms << "-" << iv.end_ms;
    os << "\nutterances " << detail::join_ids(s.scene.utterance_ids) << "\n";
    os << "speech_ms " << s.speech_ms << "\n";
    if (s.excluded) {
      os << "excluded: no utterances\n";
    } else {
      os << "audio " << detail::partition_text(s.audio) << "\n";
      os << "video " << detail::partition_text(s.video) << "\n";
      os << "ws " << detail::partition_text(s.ws) << "\n";
      os << "weights_ms";
      for (int i = 0; i < s.fusion.weights.audio_clusters; ++i) {
        os << " [";
        for (int j = 0; j < s.fusion.weights.video_clusters; ++j) {
          if (j) os << " ";
          os << s.fusion.weights.at(i, j);
        }
        os << "]";
      }
      os << "\nmatching";
      for (const auto& [i, j] : s.fusion.matching.pairs) os << " (" << i << "," << j << ")";
      os << " total_ms " << s.fusion.matching.total_ms << "\n";
      os << "kept " << detail::partition_text(s.fusion.kept) << "\n";
      os << "discarded {" << detail::join_ids(s.fusion.discarded) << "}\n";
      os << "final " << detail::partition_text(s.fusion.final_partition) << "\n";
      os << "degenerate " << (s.fusion.degenerate ? 1 : 0) << "\n";
    }
    detail::write_file(
        (fs::path(cfg.out_dir) / ("trace_scene_" + std::to_string(s.scene.id) + ".txt")).string(),
        os.str());
  }
}

}  // namespace avdiar
