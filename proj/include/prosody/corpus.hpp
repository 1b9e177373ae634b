#ifndef PROSODY_CORPUS_HPP
#define PROSODY_CORPUS_HPP

// Corpus model: phonetic segmentation, F0 track, and the vocalic-nucleus
// sequence carrying expert marks and listener votes.
//
// Files (tab separated, '#' starts a comment line):
//   segments.tsv        start_s  end_s  label  is_vowel(0|1)
//   f0.tsv              time_s   f0_hz            (0 Hz = unvoiced)
//   expert_marks.tsv    nucleus_index  mark       ('\' escaped as "\\")
//   listener_votes.tsv  nucleus_index  frontier_votes  accent_votes

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "prosody/coding.hpp"
#include "prosody/error.hpp"
#include "prosody/tsv.hpp"

namespace prosody {

inline constexpr unsigned kDefaultListeners = 17;

struct PhoneticSegment {
  double start = 0.0;
  double end = 0.0;
  std::string label;
  bool is_vowel = false;

  double duration() const { return end - start; }
  bool operator==(const PhoneticSegment&) const = default;
};

struct F0Sample {
  double time = 0.0;
  double f0 = 0.0;

  bool voiced() const { return f0 > 0.0; }
  bool operator==(const F0Sample&) const = default;
};

struct F0Track {
  std::vector<F0Sample> samples;
  bool operator==(const F0Track&) const = default;
};

struct VocalicNucleus {
  std::size_t index = 0;
  PhoneticSegment segment;
  std::vector<ProsodicMark> expert_marks;
  unsigned frontier_votes = 0;
  unsigned accent_votes = 0;
  bool operator==(const VocalicNucleus&) const = default;
};

struct Corpus {
  std::vector<PhoneticSegment> segments;
  F0Track f0;
  std::vector<VocalicNucleus> nuclei;
  unsigned n_listeners = kDefaultListeners;
  bool operator==(const Corpus&) const = default;

  /// End of the last segment, i.e. the end of the utterance.
  double end_time() const { return segments.empty() ? 0.0 : segments.back().end; }
};

// ---------------------------------------------------------------------------
// Segmentation

inline void validate_segment(const PhoneticSegment& s, const PhoneticSegment* prev, const std::string& source,
                             std::size_t line) {
  if (!(s.start >= 0.0)) throw FormatError(source, line, "negative start time");
  if (!(s.end > s.start)) throw FormatError(source, line, "end <= start");
  if (prev) {
    if (s.start < prev->start) throw FormatError(source, line, "unsorted at line " + std::to_string(line));
    if (s.start < prev->end) throw FormatError(source, line, "overlaps previous segment");
  }
}

inline std::vector<PhoneticSegment> parse_segmentation(std::istream& in, const std::string& source = "segments") {
  std::vector<PhoneticSegment> out;
  for (const auto& row : tsv::read_rows(in)) {
    tsv::expect_fields(row, 4, source);
    PhoneticSegment s;
    s.start = tsv::field_double(row, 0, source, "start");
    s.end = tsv::field_double(row, 1, source, "end");
    s.label = row.fields[2];
    if (s.label.empty()) throw FormatError(source, row.line, "empty label");
    const auto& flag = row.fields[3];
    if (flag != "0" && flag != "1") throw FormatError(source, row.line, "is_vowel must be 0 or 1");
    s.is_vowel = flag == "1";
    validate_segment(s, out.empty() ? nullptr : &out.back(), source, row.line);
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<PhoneticSegment> load_segmentation(const std::string& path) {
  auto in = tsv::open_input(path);
  return parse_segmentation(in, path);
}

// ---------------------------------------------------------------------------
// F0

inline F0Track parse_f0(std::istream& in, const std::string& source = "f0") {
  F0Track track;
  for (const auto& row : tsv::read_rows(in)) {
    tsv::expect_fields(row, 2, source);
    F0Sample s{tsv::field_double(row, 0, source, "time"), tsv::field_double(row, 1, source, "f0")};
    if (s.f0 < 0.0) throw FormatError(source, row.line, "negative F0 at line " + std::to_string(row.line));
    if (!track.samples.empty() && !(s.time > track.samples.back().time))
      throw FormatError(source, row.line, "non-monotone time at line " + std::to_string(row.line));
    track.samples.push_back(s);
  }
  return track;
}

inline F0Track load_f0(const std::string& path) {
  auto in = tsv::open_input(path);
  return parse_f0(in, path);
}

// ---------------------------------------------------------------------------
// Mark and vote tiers

struct MarkEntry {
  std::size_t line = 0;
  std::size_t nucleus = 0;
  ProsodicMark mark;
};

struct VoteEntry {
  std::size_t line = 0;
  std::size_t nucleus = 0;
  unsigned frontier = 0;
  unsigned accent = 0;
};

struct VoteTable {
  std::vector<VoteEntry> entries;
  /// From a "# n_listeners=N" header line, when present.
  std::optional<unsigned> n_listeners;
};

namespace detail {

inline std::size_t nucleus_field(const tsv::Row& row, const std::string& source) {
  auto v = tsv::field_int(row, 0, source, "nucleus index");
  if (v < 0) throw FormatError(source, row.line, "negative nucleus index");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

inline std::vector<MarkEntry> parse_expert_marks(std::istream& in, const std::string& source = "expert_marks") {
  std::vector<MarkEntry> out;
  for (const auto& row : tsv::read_rows(in)) {
    tsv::expect_fields(row, 2, source);
    MarkEntry e;
    e.line = row.line;
    e.nucleus = detail::nucleus_field(row, source);
    try {
      e.mark = parse_mark(unescape_mark_field(row.fields[1]));
    } catch (const MarkError& err) {
      throw FormatError(source, row.line, err.what());
    }
    out.push_back(std::move(e));
  }
  return out;
}

inline VoteTable parse_listener_votes(std::istream& in, const std::string& source = "listener_votes") {
  VoteTable table;
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  {
    std::istringstream header(text);
    std::string line;
    const std::string key = "# n_listeners=";
    while (std::getline(header, line)) {
      if (line.starts_with(key)) {
        auto v = tsv::to_int(line.substr(key.size()));
        if (!v || *v < 0) throw FormatError(source, 0, "bad n_listeners header");
        table.n_listeners = static_cast<unsigned>(*v);
      }
    }
  }
  std::istringstream body(text);
  for (const auto& row : tsv::read_rows(body)) {
    tsv::expect_fields(row, 3, source);
    VoteEntry e;
    e.line = row.line;
    e.nucleus = detail::nucleus_field(row, source);
    auto f = tsv::field_int(row, 1, source, "frontier votes");
    auto a = tsv::field_int(row, 2, source, "accent votes");
    if (f < 0 || a < 0) throw FormatError(source, row.line, "negative vote count");
    e.frontier = static_cast<unsigned>(f);
    e.accent = static_cast<unsigned>(a);
    table.entries.push_back(e);
  }
  return table;
}

/// One nucleus per vowel segment, in time order, with marks and votes attached.
inline std::vector<VocalicNucleus> extract_nuclei(const std::vector<PhoneticSegment>& segments,
                                                  const std::vector<MarkEntry>& marks,
                                                  const std::vector<VoteEntry>& votes, unsigned n_listeners) {
  std::vector<VocalicNucleus> nuclei;
  for (const auto& s : segments) {
    if (!s.is_vowel) continue;
    VocalicNucleus n;
    n.index = nuclei.size();
    n.segment = s;
    nuclei.push_back(std::move(n));
  }
  for (const auto& m : marks) {
    if (m.nucleus >= nuclei.size())
      throw FormatError("expert_marks", m.line,
                        "nucleus index " + std::to_string(m.nucleus) + " out of range (" +
                            std::to_string(nuclei.size()) + " nuclei)");
    nuclei[m.nucleus].expert_marks.push_back(m.mark);
  }
  std::vector<bool> seen(nuclei.size(), false);
  for (const auto& v : votes) {
    if (v.nucleus >= nuclei.size())
      throw FormatError("listener_votes", v.line,
                        "nucleus index " + std::to_string(v.nucleus) + " out of range (" +
                            std::to_string(nuclei.size()) + " nuclei)");
    if (seen[v.nucleus]) throw FormatError("listener_votes", v.line, "duplicate nucleus index");
    if (v.frontier > n_listeners || v.accent > n_listeners)
      throw FormatError("listener_votes", v.line,
                        "vote count exceeds n_listeners=" + std::to_string(n_listeners));
    seen[v.nucleus] = true;
    nuclei[v.nucleus].frontier_votes = v.frontier;
    nuclei[v.nucleus].accent_votes = v.accent;
  }
  return nuclei;
}

// ---------------------------------------------------------------------------
// Whole-corpus I/O

struct CorpusPaths {
  std::string segments;
  std::string f0;
  std::string expert_marks;    ///< optional; empty = no expert tier
  std::string listener_votes;  ///< optional; empty = no listener tier

  /// Standard file names inside a directory; the two tiers only if present.
  static CorpusPaths in_dir(const std::filesystem::path& dir) {
    CorpusPaths p;
    p.segments = (dir / "segments.tsv").string();
    p.f0 = (dir / "f0.tsv").string();
    if (std::filesystem::exists(dir / "expert_marks.tsv")) p.expert_marks = (dir / "expert_marks.tsv").string();
    if (std::filesystem::exists(dir / "listener_votes.tsv")) p.listener_votes = (dir / "listener_votes.tsv").string();
    return p;
  }
};

/// `n_listeners` overrides the votes file header; falls back to 17.
inline Corpus load_corpus(const CorpusPaths& paths, std::optional<unsigned> n_listeners = std::nullopt) {
  Corpus c;
  c.segments = load_segmentation(paths.segments);
  c.f0 = load_f0(paths.f0);
  std::vector<MarkEntry> marks;
  if (!paths.expert_marks.empty()) {
    auto in = tsv::open_input(paths.expert_marks);
    marks = parse_expert_marks(in, paths.expert_marks);
  }
  VoteTable votes;
  if (!paths.listener_votes.empty()) {
    auto in = tsv::open_input(paths.listener_votes);
    votes = parse_listener_votes(in, paths.listener_votes);
  }
  c.n_listeners = n_listeners.value_or(votes.n_listeners.value_or(kDefaultListeners));
  c.nuclei = extract_nuclei(c.segments, marks, votes.entries, c.n_listeners);
  return c;
}

namespace detail {

/// Six decimals when that is lossless, else the shortest exact form.
inline std::string time_field(double v) {
  auto s = tsv::fixed(v, 6);
  if (auto back = tsv::to_double(s); back && *back == v) return s;
  return tsv::exact(v);
}

}  // namespace detail

inline void write_segmentation(std::ostream& out, const std::vector<PhoneticSegment>& segments) {
  out << "# start_s\tend_s\tlabel\tis_vowel\n";
  for (const auto& s : segments)
    out << detail::time_field(s.start) << '\t' << detail::time_field(s.end) << '\t' << s.label << '\t'
        << (s.is_vowel ? 1 : 0) << '\n';
}

inline void write_f0(std::ostream& out, const F0Track& track) {
  out << "# time_s\tf0_hz\n";
  for (const auto& s : track.samples) out << detail::time_field(s.time) << '\t' << detail::time_field(s.f0) << '\n';
}

inline void write_expert_marks(std::ostream& out, const std::vector<VocalicNucleus>& nuclei) {
  out << "# nucleus_index\tmark\n";
  for (const auto& n : nuclei)
    for (const auto& m : n.expert_marks) out << n.index << '\t' << escape_mark_field(render_mark(m)) << '\n';
}

/// Only nuclei with at least one vote are written.
inline void write_listener_votes(std::ostream& out, const std::vector<VocalicNucleus>& nuclei, unsigned n_listeners) {
  out << "# n_listeners=" << n_listeners << '\n';
  out << "# nucleus_index\tfrontier_votes\taccent_votes\n";
  for (const auto& n : nuclei)
    if (n.frontier_votes > 0 || n.accent_votes > 0)
      out << n.index << '\t' << n.frontier_votes << '\t' << n.accent_votes << '\n';
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

}  // namespace detail

inline void save_corpus(const std::filesystem::path& dir, const Corpus& corpus) {
  std::filesystem::create_directories(dir);
  {
    auto out = detail::open_output(dir / "segments.tsv");
    write_segmentation(out, corpus.segments);
  }
  {
    auto out = detail::open_output(dir / "f0.tsv");
    write_f0(out, corpus.f0);
  }
  {
    auto out = detail::open_output(dir / "expert_marks.tsv");
    write_expert_marks(out, corpus.nuclei);
  }
  {
    auto out = detail::open_output(dir / "listener_votes.tsv");
    write_listener_votes(out, corpus.nuclei, corpus.n_listeners);
  }
}

}  // namespace prosody

#endif  // PROSODY_CORPUS_HPP
