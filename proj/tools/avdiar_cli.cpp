// Command-line front end: shot analysis, dialogue-pattern extraction, the
// diarization pipeline, shot-metric scoring, and the synthetic-corpus
// generator, sharing one configuration surface (flags win over --config).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "avdiar/avdiar.hpp"

namespace {

namespace fs = std::filesystem;

int cmd_shots(const avdiar::PipelineConfig& cfg, const std::string& frames_dir,
              const std::string& hist_in, const std::string& hist_out) {
  const avdiar::HistogramGeometry geom;
  std::vector<avdiar::BlockHistogramFrame> frames;
  if (!frames_dir.empty())
    frames = avdiar::load_frame_histograms(frames_dir, geom);
  else if (!hist_in.empty())
    frames = avdiar::read_histogram_file(hist_in, geom);
  else
    throw avdiar::ParseError("shots: provide --frames or --histograms");
  if (frames.empty()) throw avdiar::ParseError("shots: no frames found");
  if (!hist_out.empty()) avdiar::write_histogram_file(frames, hist_out);

  const avdiar::Thresholds th{cfg.theta_cut, cfg.theta_sim};
  std::vector<avdiar::Shot> shots = avdiar::detect_cuts(frames, th, cfg.fps);
  const auto pairs = avdiar::detect_similar_shots(shots, frames, th);
  const avdiar::ShotSequence seq = avdiar::assign_labels(std::move(shots), pairs);

  fs::create_directories(cfg.out_dir);
  avdiar::save_shot_table(seq.shots, (fs::path(cfg.out_dir) / "shots.csv").string());
  std::printf("frames %zu shots %zu labels %d similar_pairs %zu\n", frames.size(),
              seq.shots.size(), seq.label_count, pairs.size());
  return 0;
}

int cmd_patterns(const avdiar::PipelineConfig& cfg, const std::string& shots_path,
                 const std::string& srt_path, const std::string& speakers_path) {
  const std::vector<avdiar::Shot> shots = avdiar::load_shot_table(shots_path);
  std::vector<avdiar::ShotLabel> labels;
  labels.reserve(shots.size());
  for (const auto& s : shots) labels.push_back(s.label);
  const auto patterns = avdiar::extract_patterns(labels);

  std::vector<avdiar::Utterance> utterances;
  if (!srt_path.empty())
    utterances =
        avdiar::subtitles_to_utterances(avdiar::parse_srt(avdiar::detail::read_file(srt_path)));
  const std::vector<avdiar::Scene> scenes =
      avdiar::build_scenes(shots, patterns, utterances, cfg.min_cover);

  fs::create_directories(cfg.out_dir);
  std::string text;
  for (const auto& pr : patterns) {
    const avdiar::PatternMatch pm = avdiar::pattern_runs(labels, pr);
    text += "pattern " + std::to_string(pr.first) + " " + std::to_string(pr.second) + "\n";
    text += "  match_runs";
    for (const auto& run : pm.match_runs)
      text += " " + std::to_string(run.first) + "-" + std::to_string(run.last);
    text += "\n  isolated_runs";
    for (const auto& run : pm.isolated_runs)
      text += " " + std::to_string(run.first) + "-" + std::to_string(run.last);
    text += "\n";
  }
  avdiar::detail::write_file((fs::path(cfg.out_dir) / "patterns.txt").string(), text);

  std::string csv = "scene_id,label1,label2,intervals,utterances,speech_ms\n";
  for (const auto& sc : scenes) {
    csv += std::to_string(sc.id) + "," + std::to_string(sc.pattern.first) + "," +
           std::to_string(sc.pattern.second) + ",";
    for (size_t i = 0; i < sc.intervals.size(); ++i) {
      if (i) csv += ";";
      csv += std::to_string(sc.intervals[i].start_ms) + "-" +
             std::to_string(sc.intervals[i].end_ms);
    }
    csv += ",";
    avdiar::Millis speech = 0;
    for (size_t i = 0; i < sc.utterance_ids.size(); ++i) {
      if (i) csv += ";";
      csv += std::to_string(sc.utterance_ids[i]);
    }
    for (int id : sc.utterance_ids)
      for (const auto& u : utterances)
        if (u.id == id) speech += u.span.duration_ms();
    csv += "," + std::to_string(speech) + "\n";
  }
  avdiar::detail::write_file((fs::path(cfg.out_dir) / "scenes.csv").string(), csv);

  std::map<int, std::string> reference;
  const std::map<int, std::string>* ref_ptr = nullptr;
  if (!speakers_path.empty() && !utterances.empty()) {
    std::set<int> ids;
    for (const auto& u : utterances) ids.insert(u.id);
    reference = avdiar::load_reference(speakers_path, ids);
    ref_ptr = &reference;
  }
  const avdiar::SceneStats st = avdiar::scene_stats(scenes, utterances, ref_ptr);
  std::printf("patterns %zu scenes %d mean_speech_s %.2f coverage_pct %.2f", patterns.size(),
              st.scene_count, st.mean_speech_s, st.total_coverage_pct);
  if (st.mean_speakers)
    std::printf(" speakers %.2f +- %.2f", *st.mean_speakers, *st.std_speakers);
  std::printf("\n");
  return 0;
}

int cmd_diarize(const avdiar::PipelineConfig& cfg) {
  const avdiar::EpisodeResult r = avdiar::run_diarize_files(cfg);
  avdiar::write_reports(r, cfg);
  if (r.scored_scenes > 0)
    std::printf(
        "scenes %zu scored %d audio %.2f video %.2f oracle %.2f om-ra %.2f (%.1f%%) om+ra "
        "%.2f ws %.2f\n",
        r.scenes.size(), r.scored_scenes, 100 * r.show_audio, 100 * r.show_video,
        100 * r.show_oracle, 100 * r.show_omra, r.omra_coverage_pct, 100 * r.show_ompra,
        100 * r.show_ws);
  else
    std::printf("scenes %zu (no reference; nothing scored)\n", r.scenes.size());
  return 0;
}

std::vector<int> cut_frames_of(const std::vector<avdiar::Shot>& shots, double fps) {
  std::vector<int> cuts;
  for (size_t i = 1; i < shots.size(); ++i)
    cuts.push_back(static_cast<int>(std::llround(shots[i].span.start_ms * fps / 1000.0)));
  return cuts;
}

std::vector<std::pair<int, int>> label_pairs_of(const std::vector<avdiar::Shot>& shots) {
  std::vector<std::pair<int, int>> pairs;
  for (size_t q = 0; q < shots.size(); ++q)
    for (size_t c = q + 1; c < shots.size(); ++c)
      if (shots[q].label >= 0 && shots[q].label == shots[c].label)
        pairs.emplace_back(static_cast<int>(q), static_cast<int>(c));
  return pairs;
}

int cmd_score_shots(const avdiar::PipelineConfig& cfg, const std::string& hyp_path,
                    const std::string& ref_path, int tol_frames) {
  const std::vector<avdiar::Shot> hyp = avdiar::load_shot_table(hyp_path);
  const std::vector<avdiar::Shot> ref = avdiar::load_shot_table(ref_path);
  const avdiar::DetectionScore cuts = avdiar::score_shot_cuts(
      cut_frames_of(hyp, cfg.fps), cut_frames_of(ref, cfg.fps), tol_frames);
  const int shot_count = static_cast<int>(std::max(hyp.size(), ref.size()));
  const avdiar::DetectionScore sim =
      avdiar::score_shot_similarity(label_pairs_of(hyp), label_pairs_of(ref), shot_count);

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "cuts precision %.4f recall %.4f f1 %.4f\n"
                "similarity precision %.4f recall %.4f f1 %.4f\n",
                cuts.precision, cuts.recall, cuts.f1, sim.precision, sim.recall, sim.f1);
  fs::create_directories(cfg.out_dir);
  avdiar::detail::write_file((fs::path(cfg.out_dir) / "score_shots.txt").string(), buf);
  std::fputs(buf, stdout);
  return 0;
}

int cmd_synth(const avdiar::PipelineConfig& cfg, const avdiar::GenConfig& gen) {
  const avdiar::Episode ep = avdiar::generate_episode(gen);
  avdiar::emit_corpus(ep, cfg.out_dir);
  std::printf("scenes %zu shots %zu utterances %zu labels %d frames %zu\n",
              ep.planted_scenes.size(), ep.shots.size(), ep.utterances.size(), ep.label_count,
              ep.frames.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"audiovisual speaker diarization of two-character dialogue scenes"};
  app.set_config("--config", "", "key=value configuration file (flags win)");
  app.require_subcommand(1);
  app.fallthrough();  // shared options may follow the subcommand name

  avdiar::PipelineConfig cfg;
  app.add_option("--jobs", cfg.jobs, "scene-level worker threads")->capture_default_str();
  app.add_option("--theta-cut", cfg.theta_cut, "shot-cut similarity threshold")
      ->capture_default_str();
  app.add_option("--theta-sim", cfg.theta_sim, "shot-similarity threshold")
      ->capture_default_str();
  app.add_option("--alpha", cfg.alpha, "audio weight of the weighted-sum baseline")
      ->capture_default_str();
  app.add_option("--min-cover", cfg.min_cover, "scene-overlap share assigning an utterance")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "generator seed")->capture_default_str();
  app.add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
  app.add_option("--fps", cfg.fps, "frame rate of the frame grid")->capture_default_str();
  app.add_option("--p", cfg.p, "clusters per scene and modality")->capture_default_str();

  auto* shots_cmd = app.add_subcommand("shots", "detect cuts and similarity labels");
  std::string frames_dir, hist_in, hist_out;
  shots_cmd->add_option("--frames", frames_dir, "directory of PPM frames");
  shots_cmd->add_option("--histograms", hist_in, "packed block-histogram file");
  shots_cmd->add_option("--save-histograms", hist_out, "also write the packed histograms");

  auto* patterns_cmd = app.add_subcommand("patterns", "extract dialogue patterns and scenes");
  std::string shots_path, srt_path, speakers_path;
  patterns_cmd->add_option("--shots", shots_path, "labeled shot table")->required();
  patterns_cmd->add_option("--srt", srt_path, "subtitles for utterance statistics");
  patterns_cmd->add_option("--speakers", speakers_path, "reference speakers for statistics");

  auto* diarize_cmd = app.add_subcommand("diarize", "run the full pipeline and reports");
  diarize_cmd->add_option("--srt", cfg.srt_path, "subtitle file")->required();
  diarize_cmd->add_option("--shots", cfg.shots_path, "labeled shot table")->required();
  diarize_cmd->add_option("--ivectors", cfg.embeddings_path, "utterance embeddings")->required();
  diarize_cmd->add_option("--speakers", cfg.reference_path, "reference speakers (scoring)");
  diarize_cmd->add_option("--systems", cfg.systems, "comma list of systems to report")
      ->capture_default_str();

  auto* score_cmd = app.add_subcommand("score-shots", "score hypothesis shots against reference");
  std::string hyp_path, ref_path;
  int tol_frames = 1;
  score_cmd->add_option("--hyp", hyp_path, "hypothesis shot table")->required();
  score_cmd->add_option("--ref", ref_path, "reference shot table")->required();
  score_cmd->add_option("--tol-frames", tol_frames, "cut tolerance in frames")
      ->capture_default_str();

  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
  avdiar::GenConfig gen;
  synth_cmd->add_option("--scenes", gen.scenes, "dialogue scenes")->capture_default_str();
  synth_cmd->add_option("--utt-min", gen.utt_min, "minimum utterances per scene")
      ->capture_default_str();
  synth_cmd->add_option("--utt-max", gen.utt_max, "maximum utterances per scene")
      ->capture_default_str();
  synth_cmd->add_option("--separation", gen.separation, "audio center separation")
      ->capture_default_str();
  synth_cmd->add_option("--p-async", gen.p_async, "voice-over probability")
      ->capture_default_str();
  synth_cmd->add_option("--p-outlier", gen.p_outlier, "acoustic outlier probability")
      ->capture_default_str();
  synth_cmd->add_option("--single-speaker-prob", gen.single_speaker_prob,
                        "one-speaker scene probability")
      ->capture_default_str();
  synth_cmd->add_option("--outlier-lo", gen.outlier_lo, "outlier radius lower bound")
      ->capture_default_str();
  synth_cmd->add_option("--outlier-hi", gen.outlier_hi, "outlier radius upper bound")
      ->capture_default_str();
  synth_cmd->add_option("--dim", gen.dim, "embedding dimension")->capture_default_str();
  synth_cmd->add_flag("--with-frames", gen.with_frames, "emit PPM frames");
  synth_cmd->add_option("--frame-width", gen.frame_width, "frame width")->capture_default_str();
  synth_cmd->add_option("--frame-height", gen.frame_height, "frame height")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (shots_cmd->parsed()) return cmd_shots(cfg, frames_dir, hist_in, hist_out);
    if (patterns_cmd->parsed()) return cmd_patterns(cfg, shots_path, srt_path, speakers_path);
    if (diarize_cmd->parsed()) return cmd_diarize(cfg);
    if (score_cmd->parsed()) return cmd_score_shots(cfg, hyp_path, ref_path, tol_frames);
    if (synth_cmd->parsed()) {
      gen.seed = cfg.seed;
      gen.fps = cfg.fps;
      return cmd_synth(cfg, gen);
    }
  } catch (const avdiar::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
