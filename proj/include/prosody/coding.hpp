#ifndef PROSODY_CODING_HPP
#define PROSODY_CODING_HPP

// Prosodic coding scheme: symbols, composite marks, and the grouping of
// marks into the five generic classes used as MLP targets.
//
//   R   initial rise on the first syllable of a word   (Ri, R-)
//   L   prominent fall on the last syllable of a word  (Li, L-)
//   P   peak                                           (P^, P/, P\, Ph)
//   B   crossing of the baseline
//   Rc  continuation rise, last syllable of the prosodic group
//   S   sustained, last syllable of prosodic groups
//   U   valley on a grammatical word
//   V   sharp dip due to enhanced micromelody
//
// Parts combine with '+', e.g. "B+Rc".

#include <array>
#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "prosody/error.hpp"

namespace prosody {

enum class BaseSymbol { R, L, P, B, Rc, S, U, V };
inline constexpr std::array<BaseSymbol, 8> kAllBaseSymbols = {
    BaseSymbol::R, BaseSymbol::L, BaseSymbol::P, BaseSymbol::B,
    BaseSymbol::Rc, BaseSymbol::S, BaseSymbol::U, BaseSymbol::V};

enum class PeakModifier { Caret, SlashLeft, Backslash, High };
inline constexpr std::array<PeakModifier, 4> kAllPeakModifiers = {
    PeakModifier::Caret, PeakModifier::SlashLeft, PeakModifier::Backslash, PeakModifier::High};

/// Movement delayed on the i-th syllable ("R2").
struct SyllableNumber {
  unsigned value = 1;
  bool operator==(const SyllableNumber&) const = default;
};

/// Movement on the head or tail of the current group ("R-").
struct GroupEdge {
  bool operator==(const GroupEdge&) const = default;
};

using PositionIndex = std::variant<SyllableNumber, GroupEdge>;

struct MarkPart {
  BaseSymbol base = BaseSymbol::P;
  std::optional<PeakModifier> modifier;
  std::optional<PositionIndex> index;
  bool operator==(const MarkPart&) const = default;
};

struct ProsodicMark {
  std::vector<MarkPart> parts;
  bool operator==(const ProsodicMark&) const = default;
};

/// The five MLP output classes, in the row order of the confusion tables.
enum class GenericClass { Nil = 0, B = 1, C = 2, P = 3, R = 4 };
inline constexpr std::size_t kNumGenericClasses = 5;
inline constexpr std::array<GenericClass, kNumGenericClasses> kAllGenericClasses = {
    GenericClass::Nil, GenericClass::B, GenericClass::C, GenericClass::P, GenericClass::R};

inline constexpr std::string_view to_string(BaseSymbol s) {
  switch (s) {
    case BaseSymbol::R: return "R";
    case BaseSymbol::L: return "L";
    case BaseSymbol::P: return "P";
    case BaseSymbol::B: return "B";
    case BaseSymbol::Rc: return "Rc";
    case BaseSymbol::S: return "S";
    case BaseSymbol::U: return "U";
    case BaseSymbol::V: return "V";
  }
  return "?";
}

inline constexpr char to_char(PeakModifier m) {
  switch (m) {
    case PeakModifier::Caret: return '^';
    case PeakModifier::SlashLeft: return '/';
    case PeakModifier::Backslash: return '\\';
    case PeakModifier::High: return 'h';
  }
  return '?';
}

inline constexpr std::string_view to_string(GenericClass c) {
  switch (c) {
    case GenericClass::Nil: return "Nil";
    case GenericClass::B: return "B";
    case GenericClass::C: return "C";
    case GenericClass::P: return "P";
    case GenericClass::R: return "R";
  }
  return "?";
}

inline std::optional<GenericClass> generic_class_from_string(std::string_view s) {
  for (auto c : kAllGenericClasses)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

namespace detail {

inline std::optional<PeakModifier> modifier_from_char(char c) {
  for (auto m : kAllPeakModifiers)
    if (to_char(m) == c) return m;
  return std::nullopt;
}

inline bool takes_index(BaseSymbol b) { return b == BaseSymbol::R || b == BaseSymbol::L; }

inline MarkPart parse_part(std::string_view text, std::string_view whole) {
  auto fail = [&](const std::string& why) -> MarkError {
    return MarkError("invalid mark '" + std::string(whole) + "': " + why);
  };
  if (text.empty()) throw fail("empty part");

  MarkPart part;
  std::size_t pos = 0;
  if (text.starts_with("Rc")) {
    part.base = BaseSymbol::Rc;
    pos = 2;
  } else {
    bool found = false;
    for (auto b : kAllBaseSymbols) {
      auto name = to_string(b);
      if (name.size() == 1 && name[0] == text[0]) {
        part.base = b;
        found = true;
        break;
      }
    }
    if (!found) throw fail("unknown base symbol '" + std::string(1, text[0]) + "'");
    pos = 1;
  }

  if (pos < text.size()) {
    if (auto m = modifier_from_char(text[pos])) {
      if (part.base != BaseSymbol::P) throw fail("modifier on non-P base");
      part.modifier = *m;
      ++pos;
    }
  }

  if (pos < text.size()) {
    if (text[pos] == '-') {
      if (!takes_index(part.base)) throw fail("index on non-R/L base");
      part.index = GroupEdge{};
      ++pos;
    } else if (std::isdigit(static_cast<unsigned char>(text[pos]))) {
      if (!takes_index(part.base)) throw fail("index on non-R/L base");
      if (text[pos] == '0') throw fail("syllable index must be a positive integer without leading zeros");
      unsigned value = 0;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        value = value * 10 + static_cast<unsigned>(text[pos] - '0');
        if (value > 1000000) throw fail("syllable index too large");
        ++pos;
      }
      part.index = SyllableNumber{value};
    }
  }

  if (pos < text.size()) {
    if (part.modifier && modifier_from_char(text[pos])) throw fail("more than one modifier");
    throw fail("unexpected '" + std::string(text.substr(pos)) + "'");
  }
  return part;
}

}  // namespace detail

/// Grammar: mark := part ('+' part)*; part := base modifier? index?
/// The base is matched longest-first, so "Rc" is never read as "R" + "c".
inline ProsodicMark parse_mark(std::string_view text) {
  if (text.empty()) throw MarkError("invalid mark: empty string");
  ProsodicMark mark;
  std::size_t pos = 0;
  while (true) {
    auto next = text.find('+', pos);
    auto piece = text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    mark.parts.push_back(detail::parse_part(piece, text));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return mark;
}

inline std::string render_mark(const ProsodicMark& mark) {
  std::string out;
  for (std::size_t i = 0; i < mark.parts.size(); ++i) {
    const auto& p = mark.parts[i];
    if (i > 0) out += '+';
    out += to_string(p.base);
    if (p.modifier) out += to_char(*p.modifier);
    if (p.index) {
      if (std::holds_alternative<GroupEdge>(*p.index))
        out += '-';
      else
        out += std::to_string(std::get<SyllableNumber>(*p.index).value);
    }
  }
  return out;
}

/// Escapes '\' as "\\" for storage in a TSV field.
inline std::string escape_mark_field(std::string_view raw) {
  std::string out;
  for (char c : raw) {
    if (c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline std::string unescape_mark_field(std::string_view field) {
  std::string out;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field[i] == '\\') {
      if (i + 1 >= field.size() || field[i + 1] != '\\')
        throw MarkError("unescaped backslash in mark field '" + std::string(field) + "'");
      ++i;
    }
    out += field[i];
  }
  return out;
}

/// Which part of a composite mark decides its class.
enum class CompositeRule { FirstPart, LastPart };

/// Total mapping from base symbols onto the generic classes.
class ClassMap {
 public:
  ClassMap(std::array<GenericClass, 8> by_base, CompositeRule rule = CompositeRule::FirstPart)
      : by_base_(by_base), rule_(rule) {}

  /// R->R, P->P, B->B, Rc->C, {L,S,U,V}->Nil, first part decides.
  static ClassMap standard(CompositeRule rule = CompositeRule::FirstPart) {
    std::array<GenericClass, 8> m{};
    m[idx(BaseSymbol::R)] = GenericClass::R;
    m[idx(BaseSymbol::L)] = GenericClass::Nil;
    m[idx(BaseSymbol::P)] = GenericClass::P;
    m[idx(BaseSymbol::B)] = GenericClass::B;
    m[idx(BaseSymbol::Rc)] = GenericClass::C;
    m[idx(BaseSymbol::S)] = GenericClass::Nil;
    m[idx(BaseSymbol::U)] = GenericClass::Nil;
    m[idx(BaseSymbol::V)] = GenericClass::Nil;
    return ClassMap(m, rule);
  }

  /// Builds a map from explicit entries; every base symbol must appear exactly once.
  static ClassMap from_entries(const std::vector<std::pair<BaseSymbol, GenericClass>>& entries,
                               CompositeRule rule = CompositeRule::FirstPart) {
    std::array<GenericClass, 8> m{};
    std::array<bool, 8> seen{};
    for (auto [base, cls] : entries) {
      if (seen[idx(base)]) throw ConfigError("class map lists '" + std::string(to_string(base)) + "' twice");
      seen[idx(base)] = true;
      m[idx(base)] = cls;
    }
    for (auto b : kAllBaseSymbols)
      if (!seen[idx(b)]) throw ConfigError("class map does not cover '" + std::string(to_string(b)) + "'");
    return ClassMap(m, rule);
  }

  GenericClass of(BaseSymbol b) const { return by_base_[idx(b)]; }
  CompositeRule rule() const { return rule_; }

  GenericClass of(const ProsodicMark& mark) const {
    if (mark.parts.empty()) return GenericClass::Nil;
    const auto& deciding = rule_ == CompositeRule::FirstPart ? mark.parts.front() : mark.parts.back();
    return of(deciding.base);
  }

 private:
  static constexpr std::size_t idx(BaseSymbol b) { return static_cast<std::size_t>(b); }
  std::array<GenericClass, 8> by_base_;
  CompositeRule rule_;
};

/// Class of a nucleus from its marks: Nil when unmarked, else the first mark decides.
inline GenericClass to_generic_class(const std::vector<ProsodicMark>& marks,
                                     const ClassMap& mapping = ClassMap::standard()) {
  if (marks.empty()) return GenericClass::Nil;
  return mapping.of(marks.front());
}

}  // namespace prosody

#endif  // PROSODY_CODING_HPP
