#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "avdiar/detail/text.hpp"
#include "avdiar/model.hpp"

namespace avdiar {

/// One SRT cue: running index, display span and raw text lines.
struct SubtitleEntry {
  int index = 0;
  TimeSpan span;
  std::vector<std::string> lines;

  friend bool operator==(const SubtitleEntry&, const SubtitleEntry&) = default;
};

namespace detail {

inline bool parse_srt_time(const std::string& tok, Millis& out) {
  int hh = 0, mm = 0, ss = 0, ms = 0;
  char c1 = 0, c2 = 0, c3 = 0;
  if (std::sscanf(tok.c_str(), "%d%c%d%c%d%c%d", &hh, &c1, &mm, &c2, &ss, &c3,
                  &ms) != 7)
    return false;
  if (c1 != ':' || c2 != ':' || c3 != ',') return false;
  if (hh < 0 || mm < 0 || mm > 59 || ss < 0 || ss > 59 || ms < 0 || ms > 999)
    return false;
  out = ((static_cast<Millis>(hh) * 60 + mm) * 60 + ss) * 1000 + ms;
  return true;
}

inline std::string format_srt_time(Millis t) {
  const Millis ms = t % 1000;
  const Millis ss = (t / 1000) % 60;
  const Millis mm = (t / 60000) % 60;
  const Millis hh = t / 3600000;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%02lld:%02lld:%02lld,%03lld",
                static_cast<long long>(hh), static_cast<long long>(mm),
                static_cast<long long>(ss), static_cast<long long>(ms));
  return buf;
}

}  // namespace detail

/// Parse an SRT document. Cue indices must be strictly increasing and cue
/// starts non-decreasing; violations and malformed timestamps are fatal and
/// reported with their line number.
inline std::vector<SubtitleEntry> parse_srt(std::string_view text) {
  // UTF-8 BOM
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF")
    text.remove_prefix(3);

  const auto lines = detail::split_lines(text);
  std::vector<SubtitleEntry> entries;
  size_t i = 0;
  int prev_index = 0;
  Millis prev_start = -1;
  bool first = true;

  while (i < lines.size()) {
    if (detail::blank(lines[i])) {
      ++i;
      continue;
    }
    SubtitleEntry e;
    // index line
    {
      const std::string tok = detail::strip(lines[i]);
      char* end = nullptr;
      const long v = std::strtol(tok.c_str(), &end, 10);
      if (end == tok.c_str() || *end != '\0')
        throw ParseError("expected cue index at line " + std::to_string(i + 1) +
                         ": '" + tok + "'");
      e.index = static_cast<int>(v);
      if (!first && e.index <= prev_index)
        throw NonMonotonicIndex("cue index " + std::to_string(e.index) +
                                " after " + std::to_string(prev_index) +
                                " at line " + std::to_string(i + 1));
      ++i;
    }
    // timestamp line
    {
      if (i >= lines.size())
        throw MalformedTimestamp("missing timestamp line after cue index at line " +
                                 std::to_string(i));
      const std::string& ln = lines[i];
      const size_t arrow = ln.find("-->");
      if (arrow == std::string::npos)
        throw MalformedTimestamp("no '-->' at line " + std::to_string(i + 1));
      Millis a = 0, b = 0;
      if (!detail::parse_srt_time(detail::strip(ln.substr(0, arrow)), a) ||
          !detail::parse_srt_time(detail::strip(ln.substr(arrow + 3)), b))
        throw MalformedTimestamp("bad cue times at line " + std::to_string(i + 1) +
                                 ": '" + ln + "'");
      if (b < a)
        throw MalformedTimestamp("cue ends before it starts at line " +
                                 std::to_string(i + 1));
      e.span = TimeSpan{a, b};
      if (prev_start > a)
        throw NonMonotonicIndex("cue start goes backwards at line " +
                                std::to_string(i + 1));
      ++i;
    }
    // text lines until blank
    while (i < lines.size() && !detail::blank(lines[i])) {
      e.lines.push_back(lines[i]);
      ++i;
    }
    prev_index = e.index;
    prev_start = e.span.start_ms;
    first = false;
    entries.push_back(std::move(e));
  }
  return entries;
}

/// Inverse of parse_srt on well-formed documents.
inline std::string serialize_srt(const std::vector<SubtitleEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    out += std::to_string(e.index);
    out += '\n';
    out += detail::format_srt_time(e.span.start_ms);
    out += " --> ";
    out += detail::format_srt_time(e.span.end_ms);
    out += '\n';
    for (const auto& ln : e.lines) {
      out += ln;
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

namespace detail {

// Leading dash marks a speaker turn: ASCII '-' or U+2013 EN DASH.
inline bool dashed_line(const std::string& s) {
  size_t a = 0;
  while (a < s.size() && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  if (a >= s.size()) return false;
  if (s[a] == '-') return true;
  return s.compare(a, 3, "\xE2\x80\x93") == 0;
}

// Text with the turn marker and surrounding whitespace removed.
inline std::string strip_dash(const std::string& s) {
  std::string t = strip(s);
  if (!t.empty() && t[0] == '-')
    t.erase(0, 1);
  else if (t.compare(0, 3, "\xE2\x80\x93") == 0)
    t.erase(0, 3);
  return strip(t);
}

}  // namespace detail

/// Convert cues to utterances. A cue whose lines all carry a leading dash is
/// a multi-speaker cue: it is split into one utterance per line, the shared
/// span divided proportionally to each line's character count (bytes of the
/// stripped text, floor 1 so no part collapses to zero). Everything else
/// maps 1:1. Ids are assigned sequentially in output order.
inline std::vector<Utterance> subtitles_to_utterances(
    const std::vector<SubtitleEntry>& entries) {
  std::vector<Utterance> out;
  int next_id = 0;
  for (const auto& e : entries) {
    bool split = e.lines.size() >= 2;
    for (const auto& ln : e.lines)
      if (!detail::dashed_line(ln)) split = false;
    const Millis dur = e.span.duration_ms();
    if (split && dur >= static_cast<Millis>(e.lines.size())) {
      std::vector<long long> weights;
      long long total = 0;
      for (const auto& ln : e.lines) {
        const long long w =
            std::max<long long>(1, static_cast<long long>(detail::strip_dash(ln).size()));
        weights.push_back(w);
        total += w;
      }
      Millis prev = e.span.start_ms;
      long long cum = 0;
      for (size_t k = 0; k < weights.size(); ++k) {
        cum += weights[k];
        Millis bound =
            k + 1 == weights.size()
                ? e.span.end_ms
                : e.span.start_ms +
                      static_cast<Millis>(
                          (static_cast<double>(dur) * cum) / total + 0.5);
        if (bound <= prev) bound = prev + 1;  // keep every part non-empty
        if (bound > e.span.end_ms) bound = e.span.end_ms;
        out.push_back(Utterance{next_id++, TimeSpan{prev, bound}, std::nullopt});
        prev = bound;
      }
    } else {
      out.push_back(Utterance{next_id++, e.span, std::nullopt});
    }
  }
  return out;
}

}  // namespace avdiar
