#ifndef PROSODY_TSV_HPP
#define PROSODY_TSV_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prosody/error.hpp"

namespace prosody::tsv {

/// One data line of a TSV file, with its 1-based line number.
struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

inline std::vector<std::string> split(std::string_view text, char sep = '\t') {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    auto next = text.find(sep, pos);
    if (next == std::string_view::npos) {
      out.emplace_back(text.substr(pos));
      return out;
    }
    out.emplace_back(text.substr(pos, next - pos));
    pos = next + 1;
  }
}

/// Reads every non-blank, non-comment line. Trailing '\r' is stripped.
inline std::vector<Row> read_rows(std::istream& in) {
  std::vector<Row> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    rows.push_back({number, split(line)});
  }
  return rows;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

inline std::optional<double> to_double(std::string_view s) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

inline std::optional<long long> to_int(std::string_view s) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

inline double field_double(const Row& row, std::size_t i, const std::string& source, const char* name) {
  auto v = to_double(row.fields.at(i));
  if (!v) throw FormatError(source, row.line, std::string("bad ") + name + " '" + row.fields[i] + "'");
  return *v;
}

inline long long field_int(const Row& row, std::size_t i, const std::string& source, const char* name) {
  auto v = to_int(row.fields.at(i));
  if (!v) throw FormatError(source, row.line, std::string("bad ") + name + " '" + row.fields[i] + "'");
  return *v;
}

inline void expect_fields(const Row& row, std::size_t n, const std::string& source) {
  if (row.fields.size() != n) {
    throw FormatError(source, row.line,
                      "expected " + std::to_string(n) + " fields, got " + std::to_string(row.fields.size()));
  }
}

/// Fixed-point rendering, locale independent.
inline std::string fixed(double value, int decimals = 6) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
  if (ec != std::errc()) return "nan";
  std::string s(buf, ptr);
  if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

/// Shortest round-trip rendering.
inline std::string exact(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return "nan";
  return {buf, ptr};
}

}  // namespace prosody::tsv

#endif  // PROSODY_TSV_HPP
