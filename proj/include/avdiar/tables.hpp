#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "avdiar/detail/text.hpp"
#include "avdiar/model.hpp"

namespace avdiar {

/// Per-utterance acoustic embedding vectors, fixed dimension across the table.
struct EmbeddingTable {
  int dim = 0;
  std::map<int, std::vector<double>> vectors;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << content;
}

// Tabular files are comma- or tab-delimited with a one-line header.
inline char detect_delim(const std::string& header) {
  return header.find('\t') != std::string::npos ? '\t' : ',';
}

inline std::vector<std::string> split_fields(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == delim) {
      out.push_back(strip(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(strip(cur));
  return out;
}

inline long long parse_int(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw ParseError("expected integer in " + where + ": '" + s + "'");
  return v;
}

inline double parse_real(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ParseError("expected real in " + where + ": '" + s + "'");
  return v;
}

// %.17g round-trips doubles exactly through strtod.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// Parse an embedding table: header, then rows "utt_id,v1..vD". The
/// dimension is fixed by the first row.
inline EmbeddingTable parse_embeddings(const std::string& content,
                                       const std::string& origin = "embeddings") {
  EmbeddingTable table;
  const auto lines = detail::split_lines(content);
  if (lines.empty()) return table;
  const char delim = detail::detect_delim(lines[0]);
  for (size_t i = 1; i < lines.size(); ++i) {
    if (detail::blank(lines[i])) continue;
    const std::string where = origin + " line " + std::to_string(i + 1);
    const auto f = detail::split_fields(lines[i], delim);
    if (f.size() < 2) throw ParseError("too few fields in " + where);
    const int id = static_cast<int>(detail::parse_int(f[0], where));
    std::vector<double> v;
    v.reserve(f.size() - 1);
    for (size_t k = 1; k < f.size(); ++k)
      v.push_back(detail::parse_real(f[k], where));
    if (table.dim == 0)
      table.dim = static_cast<int>(v.size());
    else if (static_cast<int>(v.size()) != table.dim)
      throw DimensionMismatch("row of " + std::to_string(v.size()) +
                              " values among " + std::to_string(table.dim) +
                              "-value rows at " + where);
    if (!table.vectors.emplace(id, std::move(v)).second)
      throw DuplicateId("utterance " + std::to_string(id) + " at " + where);
  }
  return table;
}

inline EmbeddingTable load_embeddings(const std::string& path) {
  return parse_embeddings(detail::read_file(path), path);
}

inline std::string serialize_embeddings(const EmbeddingTable& table) {
  std::string out = "utt_id";
  for (int k = 1; k <= table.dim; ++k) out += ",v" + std::to_string(k);
  out += '\n';
  for (const auto& [id, v] : table.vectors) {
    out += std::to_string(id);
    for (double x : v) {
      out += ',';
      out += detail::format_real(x);
    }
    out += '\n';
  }
  return out;
}

inline void save_embeddings(const EmbeddingTable& table, const std::string& path) {
  detail::write_file(path, serialize_embeddings(table));
}

namespace detail {

inline ShotLabel parse_label(const std::string& s, const std::string& where) {
  if (s.empty()) return -1;
  std::string t = s;
  if (t[0] == 'c' || t[0] == 'C') t.erase(0, 1);  // accept c<k> notation
  return static_cast<ShotLabel>(parse_int(t, where));
}

}  // namespace detail

/// Parse a shot table: header, then rows "index,start_ms,end_ms[,label]".
/// Shots must tile the timeline: each row starts where the previous ended.
inline std::vector<Shot> parse_shot_table(const std::string& content,
                                          const std::string& origin = "shots") {
  std::vector<Shot> shots;
  const auto lines = detail::split_lines(content);
  if (lines.empty()) return shots;
  const char delim = detail::detect_delim(lines[0]);
  for (size_t i = 1; i < lines.size(); ++i) {
    if (detail::blank(lines[i])) continue;
    const std::string where = origin + " line " + std::to_string(i + 1);
    const auto f = detail::split_fields(lines[i], delim);
    if (f.size() < 3 || f.size() > 4)
      throw ParseError("expected 3 or 4 fields in " + where);
    Shot s;
    s.index = static_cast<int>(detail::parse_int(f[0], where));
    s.span.start_ms = detail::parse_int(f[1], where);
    s.span.end_ms = detail::parse_int(f[2], where);
    if (s.span.end_ms <= s.span.start_ms)
      throw ParseError("empty or negative shot span at " + where);
    if (!shots.empty()) {
      if (s.index <= shots.back().index)
        throw NonMonotonicIndex("shot index not increasing at " + where);
      if (s.span.start_ms != shots.back().span.end_ms)
        throw GapOrOverlapBetweenShots(
            "shot starts at " + std::to_string(s.span.start_ms) +
            " ms but previous ends at " +
            std::to_string(shots.back().span.end_ms) + " ms (" + where + ")");
    }
    if (f.size() == 4) s.label = detail::parse_label(f[3], where);
    shots.push_back(s);
  }
  return shots;
}

inline std::vector<Shot> load_shot_table(const std::string& path) {
  return parse_shot_table(detail::read_file(path), path);
}

inline std::string serialize_shot_table(const std::vector<Shot>& shots) {
  std::string out = "index,start_ms,end_ms,label\n";
  for (const auto& s : shots) {
    out += std::to_string(s.index);
    out += ',';
    out += std::to_string(s.span.start_ms);
    out += ',';
    out += std::to_string(s.span.end_ms);
    out += ',';
    if (s.label >= 0) out += std::to_string(s.label);
    out += '\n';
  }
  return out;
}

inline void save_shot_table(const std::vector<Shot>& shots, const std::string& path) {
  detail::write_file(path, serialize_shot_table(shots));
}

/// Parse a reference speaker table: header, then rows "utt_id,speaker".
/// Every id must belong to the known utterance set.
inline std::map<int, std::string> parse_reference(const std::string& content,
                                                  const std::set<int>& known_ids,
                                                  const std::string& origin = "speakers") {
  std::map<int, std::string> ref;
  const auto lines = detail::split_lines(content);
  if (lines.empty()) return ref;
  const char delim = detail::detect_delim(lines[0]);
  for (size_t i = 1; i < lines.size(); ++i) {
    if (detail::blank(lines[i])) continue;
    const std::string where = origin + " line " + std::to_string(i + 1);
    const auto f = detail::split_fields(lines[i], delim);
    if (f.size() != 2) throw ParseError("expected 2 fields in " + where);
    const int id = static_cast<int>(detail::parse_int(f[0], where));
    if (!known_ids.count(id))
      throw UnknownUtteranceId("utterance " + std::to_string(id) + " at " + where);
    if (!ref.emplace(id, f[1]).second)
      throw DuplicateId("utterance " + std::to_string(id) + " at " + where);
  }
  return ref;
}

inline std::map<int, std::string> load_reference(const std::string& path,
                                                 const std::set<int>& known_ids) {
  return parse_reference(detail::read_file(path), known_ids, path);
}

inline std::string serialize_reference(const std::map<int, std::string>& ref) {
  std::string out = "utt_id,speaker\n";
  for (const auto& [id, spk] : ref) {
    out += std::to_string(id);
    out += ',';
    out += spk;
    out += '\n';
  }
  return out;
}

inline void save_reference(const std::map<int, std::string>& ref,
                           const std::string& path) {
  detail::write_file(path, serialize_reference(ref));
}

}  // namespace avdiar
