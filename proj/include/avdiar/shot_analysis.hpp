#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "avdiar/image.hpp"
#include "avdiar/model.hpp"

namespace avdiar {

/// Block layout and HSV binning for frame histograms. The image is cut into
/// a 6x5 grid of blocks, each described by an 8x4x4-bin HSV histogram.
struct HistogramGeometry {
  int cols = 6;
  int rows = 5;
  int h_bins = 8;
  int s_bins = 4;
  int v_bins = 4;

  int blocks() const { return cols * rows; }
  int bins() const { return h_bins * s_bins * v_bins; }

  friend bool operator==(const HistogramGeometry&, const HistogramGeometry&) = default;
};

/// Per-block normalized HSV histograms of one frame. Each block's histogram
/// sums to 1. Stored as float32 to match the packed on-disk format.
struct BlockHistogramFrame {
  std::int64_t frame_index = 0;
  HistogramGeometry geom;
  std::vector<float> hist;  // blocks() x bins(), block-major

  const float* block(int b) const { return hist.data() + static_cast<size_t>(b) * geom.bins(); }

  friend bool operator==(const BlockHistogramFrame&, const BlockHistogramFrame&) = default;
};

/// Correlation thresholds for the two detection tasks.
struct Thresholds {
  double theta_cut = 0.5;
  double theta_sim = 0.7;
};

/// Shots with similarity labels assigned; label_count is |Sigma|.
struct ShotSequence {
  std::vector<Shot> shots;
  int label_count = 0;

  std::vector<ShotLabel> labels() const {
    std::vector<ShotLabel> out;
    out.reserve(shots.size());
    for (const auto& s : shots) out.push_back(s.label);
    return out;
  }
};

/// Block HSV histogram of a raster. Remainder pixels beyond the uniform
/// block grid fall into the last column/row of blocks.
inline BlockHistogramFrame frame_histogram(const RgbImage& img,
                                           const HistogramGeometry& geom = {},
                                           std::int64_t frame_index = 0) {
  if (img.width < geom.cols || img.height < geom.rows)
    throw ImageTooSmall(std::to_string(img.width) + "x" +
                        std::to_string(img.height) + " raster for a " +
                        std::to_string(geom.cols) + "x" +
                        std::to_string(geom.rows) + " block grid");
  BlockHistogramFrame f;
  f.frame_index = frame_index;
  f.geom = geom;
  const int B = geom.bins();
  std::vector<double> acc(static_cast<size_t>(geom.blocks()) * B, 0.0);
  std::vector<std::int64_t> count(geom.blocks(), 0);

  const int bw = img.width / geom.cols;
  const int bh = img.height / geom.rows;
  for (int y = 0; y < img.height; ++y) {
    const int br = std::min(geom.rows - 1, y / bh);
    for (int x = 0; x < img.width; ++x) {
      const int bc = std::min(geom.cols - 1, x / bw);
      const int b = br * geom.cols + bc;
      const std::uint8_t* px = img.pixel(x, y);
      const Hsv hsv = rgb_to_hsv(px[0], px[1], px[2]);
      const int hb = std::min(geom.h_bins - 1,
                              static_cast<int>(hsv.h / 360.0 * geom.h_bins));
      const int sb = std::min(geom.s_bins - 1, static_cast<int>(hsv.s * geom.s_bins));
      const int vb = std::min(geom.v_bins - 1, static_cast<int>(hsv.v * geom.v_bins));
      const int bin = (hb * geom.s_bins + sb) * geom.v_bins + vb;
      acc[static_cast<size_t>(b) * B + bin] += 1.0;
      count[b] += 1;
    }
  }
  f.hist.resize(acc.size());
  for (int b = 0; b < geom.blocks(); ++b)
    for (int k = 0; k < B; ++k)
      f.hist[static_cast<size_t>(b) * B + k] =
          static_cast<float>(acc[static_cast<size_t>(b) * B + k] / count[b]);
  return f;
}

namespace detail {

// Pearson correlation of two histograms. Zero-variance blocks have no
// defined correlation: identical blocks count as 1, anything else as 0.
inline double block_correlation(const float* a, const float* b, int n) {
  double ma = 0, mb = 0;
  for (int i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (int i = 0; i < n; ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0)
    return std::memcmp(a, b, sizeof(float) * n) == 0 ? 1.0 : 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace detail

/// Frame similarity in [-1, 1]: per-block Pearson correlation, averaged over
/// the best 20 of 30 blocks so that localized motion does not mask a match.
inline double compare_frames(const BlockHistogramFrame& a,
                             const BlockHistogramFrame& b,
                             int keep_blocks = 20) {
  if (a.geom != b.geom)
    throw GeometryMismatch("frames use different block/bin layouts");
  const int nb = a.geom.blocks();
  const int B = a.geom.bins();
  std::vector<double> corr(nb);
  for (int k = 0; k < nb; ++k)
    corr[k] = detail::block_correlation(a.block(k), b.block(k), B);
  keep_blocks = std::min(keep_blocks, nb);
  std::partial_sort(corr.begin(), corr.begin() + keep_blocks, corr.end(),
                    std::greater<>());
  return std::accumulate(corr.begin(), corr.begin() + keep_blocks, 0.0) / keep_blocks;
}

namespace detail {

inline Millis frame_boundary_ms(std::int64_t frame, double fps) {
  return static_cast<Millis>(std::llround(frame * 1000.0 / fps));
}

}  // namespace detail

/// Cut detection: a cut falls between adjacent frames whose similarity drops
/// below theta_cut. Shot spans are laid on the frame grid at the given rate.
inline std::vector<Shot> detect_cuts(const std::vector<BlockHistogramFrame>& frames,
                                     const Thresholds& th, double fps = 25.0) {
  std::vector<Shot> shots;
  if (frames.empty()) return shots;
  std::vector<std::int64_t> starts{0};
  for (size_t i = 0; i + 1 < frames.size(); ++i)
    if (compare_frames(frames[i], frames[i + 1]) < th.theta_cut)
      starts.push_back(static_cast<std::int64_t>(i + 1));
  starts.push_back(static_cast<std::int64_t>(frames.size()));
  for (size_t k = 0; k + 1 < starts.size(); ++k) {
    Shot s;
    s.index = static_cast<int>(k);
    s.frame_first = starts[k];
    s.frame_last = starts[k + 1] - 1;
    s.span = TimeSpan{detail::frame_boundary_ms(starts[k], fps),
                      detail::frame_boundary_ms(starts[k + 1], fps)};
    shots.push_back(s);
  }
  return shots;
}

/// Similar-shot detection: shot c matches an earlier shot q when the first
/// frame of c looks like the last frame of q.
inline std::vector<std::pair<int, int>> detect_similar_shots(
    const std::vector<Shot>& shots, const std::vector<BlockHistogramFrame>& frames,
    const Thresholds& th) {
  std::vector<std::pair<int, int>> pairs;
  for (size_t c = 1; c < shots.size(); ++c) {
    const auto& first_of_c = frames.at(static_cast<size_t>(shots[c].frame_first));
    for (size_t q = 0; q < c; ++q) {
      const auto& last_of_q = frames.at(static_cast<size_t>(shots[q].frame_last));
      if (compare_frames(first_of_c, last_of_q) >= th.theta_sim)
        pairs.emplace_back(static_cast<int>(q), static_cast<int>(c));
    }
  }
  return pairs;
}

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace detail

/// Label shots by the connected components of the similarity graph
/// (similarity is made transitive). Component ids are assigned in order of
/// first shot occurrence.
inline ShotSequence assign_labels(std::vector<Shot> shots,
                                  const std::vector<std::pair<int, int>>& pairs) {
  detail::UnionFind uf(static_cast<int>(shots.size()));
  for (const auto& [q, c] : pairs) uf.unite(q, c);
  ShotSequence seq;
  std::vector<int> root_label(shots.size(), -1);
  int next = 0;
  for (size_t i = 0; i < shots.size(); ++i) {
    const int r = uf.find(static_cast<int>(i));
    if (root_label[r] < 0) root_label[r] = next++;
    shots[i].label = root_label[r];
  }
  seq.shots = std::move(shots);
  seq.label_count = next;
  return seq;
}

// ---------------------------------------------------------------------------
// Frame input: a directory of PPM rasters named by frame index, or a packed
// histogram file. Packed layout: magic "BH30", uint32 frame count, uint32
// bins per block, then count x 30 x bins float32 histograms, all little
// endian, frame index implicit.
// ---------------------------------------------------------------------------

inline void write_histogram_file(const std::vector<BlockHistogramFrame>& frames,
                                 const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  const std::uint32_t count = static_cast<std::uint32_t>(frames.size());
  const std::uint32_t bins = frames.empty() ? 0u : static_cast<std::uint32_t>(frames[0].geom.bins());
  out.write("BH30", 4);
  out.write(reinterpret_cast<const char*>(&count), 4);
  out.write(reinterpret_cast<const char*>(&bins), 4);
  for (const auto& f : frames) {
    if (f.geom.blocks() != 30 || static_cast<std::uint32_t>(f.geom.bins()) != bins)
      throw GeometryMismatch("histogram file requires a uniform 30-block layout");
    out.write(reinterpret_cast<const char*>(f.hist.data()),
              static_cast<std::streamsize>(f.hist.size() * sizeof(float)));
  }
}

inline std::vector<BlockHistogramFrame> read_histogram_file(
    const std::string& path, const HistogramGeometry& geom = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, "BH30", 4) != 0)
    throw ParseError(path + ": not a packed histogram file");
  std::uint32_t count = 0, bins = 0;
  in.read(reinterpret_cast<char*>(&count), 4);
  in.read(reinterpret_cast<char*>(&bins), 4);
  if (count > 0 && bins != static_cast<std::uint32_t>(geom.bins()))
    throw GeometryMismatch(path + ": file has " + std::to_string(bins) +
                           " bins per block, expected " + std::to_string(geom.bins()));
  std::vector<BlockHistogramFrame> frames(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    frames[i].frame_index = i;
    frames[i].geom = geom;
    frames[i].hist.resize(static_cast<size_t>(geom.blocks()) * bins);
    in.read(reinterpret_cast<char*>(frames[i].hist.data()),
            static_cast<std::streamsize>(frames[i].hist.size() * sizeof(float)));
    if (static_cast<size_t>(in.gcount()) != frames[i].hist.size() * sizeof(float))
      throw ParseError(path + ": truncated at frame " + std::to_string(i));
  }
  return frames;
}

/// Histograms for every PPM raster in a directory, ordered by the number in
/// the file name.
inline std::vector<BlockHistogramFrame> load_frame_histograms(
    const std::string& dir, const HistogramGeometry& geom = {}) {
  namespace fs = std::filesystem;
  std::vector<std::pair<std::int64_t, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string stem = entry.path().stem().string();
    std::string digits;
    for (char c : stem)
      if (c >= '0' && c <= '9') digits.push_back(c);
    if (digits.empty()) continue;
    files.emplace_back(std::stoll(digits), entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<BlockHistogramFrame> frames;
  frames.reserve(files.size());
  for (const auto& [idx, path] : files)
    frames.push_back(frame_histogram(read_ppm(path.string()), geom,
                                     static_cast<std::int64_t>(frames.size())));
  return frames;
}

}  // namespace avdiar
