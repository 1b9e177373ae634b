#include <gtest/gtest.h>

#include <set>
#include <string>
#include <vector>

#include "prosody/coding.hpp"
#include "prosody/corpus.hpp"
#include "prosody/labels.hpp"
#include "test_util.hpp"

namespace prosody {
namespace {

TEST(ParseMark, GroupEdgeRise) {
  auto m = parse_mark("R-");
  ASSERT_EQ(m.parts.size(), 1u);
  EXPECT_EQ(m.parts[0].base, BaseSymbol::R);
  EXPECT_FALSE(m.parts[0].modifier);
  ASSERT_TRUE(m.parts[0].index);
  EXPECT_TRUE(std::holds_alternative<GroupEdge>(*m.parts[0].index));
}

TEST(ParseMark, CompositeBaselineThenContinuation) {
  auto m = parse_mark("B+Rc");
  ASSERT_EQ(m.parts.size(), 2u);
  EXPECT_EQ(m.parts[0], (MarkPart{BaseSymbol::B, std::nullopt, std::nullopt}));
  EXPECT_EQ(m.parts[1], (MarkPart{BaseSymbol::Rc, std::nullopt, std::nullopt}));
}

TEST(ParseMark, PeakModifiers) {
  EXPECT_EQ(parse_mark("P^").parts[0].modifier, PeakModifier::Caret);
  EXPECT_EQ(parse_mark("P/").parts[0].modifier, PeakModifier::SlashLeft);
  EXPECT_EQ(parse_mark("P\\").parts[0].modifier, PeakModifier::Backslash);
  EXPECT_EQ(parse_mark("Ph").parts[0].modifier, PeakModifier::High);
}

TEST(ParseMark, DelayedSyllableIndex) {
  auto m = parse_mark("L12");
  EXPECT_EQ(m.parts[0].base, BaseSymbol::L);
  EXPECT_EQ(std::get<SyllableNumber>(*m.parts[0].index).value, 12u);
}

TEST(ParseMark, RcIsAtomic) {
  auto m = parse_mark("Rc");
  ASSERT_EQ(m.parts.size(), 1u);
  EXPECT_EQ(m.parts[0].base, BaseSymbol::Rc);
}

TEST(ParseMark, Errors) {
  EXPECT_THROW(parse_mark(""), MarkError);
  EXPECT_THROW(parse_mark("P^h"), MarkError);
  EXPECT_THROW(parse_mark("Bh"), MarkError);   // modifier on non-P
  EXPECT_THROW(parse_mark("P-"), MarkError);   // index on non-R/L
  EXPECT_THROW(parse_mark("Rc2"), MarkError);  // index on Rc
  EXPECT_THROW(parse_mark("R0"), MarkError);
  EXPECT_THROW(parse_mark("R02"), MarkError);
  EXPECT_THROW(parse_mark("B+"), MarkError);
  EXPECT_THROW(parse_mark("+B"), MarkError);
  EXPECT_THROW(parse_mark("R-x"), MarkError);
  try {
    parse_mark("Q");
    FAIL();
  } catch (const MarkError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown base symbol"), std::string::npos);
  }
  try {
    parse_mark("P^h");
    FAIL();
  } catch (const MarkError& e) {
    EXPECT_NE(std::string(e.what()).find("more than one modifier"), std::string::npos);
  }
}

TEST(RenderMark, Canonical) {
  EXPECT_EQ(render_mark({{{BaseSymbol::R, std::nullopt, GroupEdge{}}}}), "R-");
  EXPECT_EQ(render_mark({{{BaseSymbol::B, std::nullopt, std::nullopt}, {BaseSymbol::Rc, std::nullopt, std::nullopt}}}),
            "B+Rc");
  EXPECT_EQ(render_mark({{{BaseSymbol::P, PeakModifier::High, std::nullopt}}}), "Ph");
}

// Every part the grammar can express, valid or not: 8 bases x 5 modifier
// states x 5 index states.
std::vector<MarkPart> all_parts() {
  std::vector<std::optional<PeakModifier>> mods = {std::nullopt};
  for (auto m : kAllPeakModifiers) mods.push_back(m);
  std::vector<std::optional<PositionIndex>> idx = {std::nullopt, GroupEdge{}, SyllableNumber{1}, SyllableNumber{2},
                                                   SyllableNumber{10}};
  std::vector<MarkPart> out;
  for (auto b : kAllBaseSymbols)
    for (auto m : mods)
      for (auto i : idx) out.push_back({b, m, i});
  return out;
}

bool part_valid(const MarkPart& p) {
  if (p.modifier && p.base != BaseSymbol::P) return false;
  if (p.index && p.base != BaseSymbol::R && p.base != BaseSymbol::L) return false;
  return true;
}

TEST(ParseMark, ExhaustiveRoundTripUpToTwoParts) {
  auto parts = all_parts();
  ASSERT_EQ(parts.size(), 8u * 5u * 5u);
  std::size_t valid = 0, rejected = 0;
  auto check = [&](const ProsodicMark& m, bool ok) {
    auto text = render_mark(m);
    if (ok) {
      EXPECT_EQ(parse_mark(text), m) << text;
      EXPECT_EQ(render_mark(parse_mark(text)), text);
      ++valid;
    } else {
      EXPECT_THROW(parse_mark(text), MarkError) << text;
      ++rejected;
    }
  };
  for (const auto& a : parts) {
    check({{a}}, part_valid(a));
    for (const auto& b : parts) check({{a, b}}, part_valid(a) && part_valid(b));
  }
  // 8 bare bases + 4 P modifiers + 2 x 4 R/L indexes = 20 valid parts.
  EXPECT_EQ(valid, 20u + 20u * 20u);
  EXPECT_EQ(valid + rejected, 200u + 200u * 200u);
}

TEST(ClassMap, StandardGrouping) {
  auto cls = [](const char* s) { return to_generic_class({parse_mark(s)}); };
  EXPECT_EQ(to_generic_class({}), GenericClass::Nil);
  EXPECT_EQ(cls("P\\"), GenericClass::P);
  EXPECT_EQ(cls("Ph"), GenericClass::P);
  EXPECT_EQ(cls("R-"), GenericClass::R);
  EXPECT_EQ(cls("R3"), GenericClass::R);
  EXPECT_EQ(cls("Rc"), GenericClass::C);
  EXPECT_EQ(cls("B"), GenericClass::B);
  for (const char* s : {"L", "L-", "S", "U", "V"}) EXPECT_EQ(cls(s), GenericClass::Nil) << s;
}

TEST(ClassMap, CompositeRule) {
  std::vector<ProsodicMark> marks = {parse_mark("B+Rc")};
  EXPECT_EQ(to_generic_class(marks), GenericClass::B);
  EXPECT_EQ(to_generic_class(marks, ClassMap::standard(CompositeRule::LastPart)), GenericClass::C);
}

TEST(ClassMap, FirstMarkDecides) {
  EXPECT_EQ(to_generic_class({parse_mark("P"), parse_mark("R")}), GenericClass::P);
}

TEST(ClassMap, TotalOverGrammar) {
  for (const auto& p : all_parts()) {
    if (!part_valid(p)) continue;
    auto c = to_generic_class({ProsodicMark{{p}}});
    EXPECT_LT(static_cast<std::size_t>(c), kNumGenericClasses);
  }
}

TEST(ClassMap, FromEntriesChecksTotality) {
  std::vector<std::pair<BaseSymbol, GenericClass>> entries;
  for (auto b : kAllBaseSymbols) entries.emplace_back(b, GenericClass::Nil);
  EXPECT_NO_THROW(ClassMap::from_entries(entries));
  entries.pop_back();
  EXPECT_THROW(ClassMap::from_entries(entries), ConfigError);
  entries.emplace_back(BaseSymbol::R, GenericClass::R);
  EXPECT_THROW(ClassMap::from_entries(entries), ConfigError);
}

TEST(MarkField, BackslashEscaping) {
  EXPECT_EQ(escape_mark_field("P\\"), "P\\\\");
  EXPECT_EQ(unescape_mark_field("P\\\\"), "P\\");
  EXPECT_THROW(unescape_mark_field("P\\"), MarkError);
}

TEST(ClassCounts, EmptyAndSingle) {
  Corpus empty;
  EXPECT_EQ(class_counts(empty), (ClassCounts{0, 0, 0, 0, 0}));
  Corpus one;
  one.nuclei.push_back({});
  EXPECT_EQ(class_counts(one), (ClassCounts{1, 0, 0, 0, 0}));
}

// The canned corpus was generated with declared counts; the first-part rule
// must reproduce them, the last-part rule moves every "B+Rc" from B to C.
TEST(ClassCounts, CannedCorpusReproducesDeclaredCounts) {
  auto corpus = load_corpus(CorpusPaths::in_dir(testing::fixture("reference_counts")));
  ASSERT_EQ(corpus.nuclei.size(), 1699u);
  auto counts = class_counts(corpus);
  EXPECT_EQ(counts[static_cast<int>(GenericClass::R)], 129u);
  EXPECT_EQ(counts[static_cast<int>(GenericClass::P)], 128u);
  EXPECT_EQ(counts[static_cast<int>(GenericClass::B)], 105u);
  EXPECT_EQ(counts[static_cast<int>(GenericClass::C)], 50u);
  EXPECT_EQ(counts[static_cast<int>(GenericClass::Nil)], 1287u);

  std::size_t composite = 0;
  for (const auto& n : corpus.nuclei)
    if (!n.expert_marks.empty() && render_mark(n.expert_marks.front()) == "B+Rc") ++composite;
  ASSERT_GT(composite, 0u);
  auto last = class_counts(corpus, ClassMap::standard(CompositeRule::LastPart));
  EXPECT_EQ(last[static_cast<int>(GenericClass::B)], 105u - composite);
  EXPECT_EQ(last[static_cast<int>(GenericClass::C)], 50u + composite);
}

TEST(ClassCounts, SumToNucleusCount) {
  auto corpus = load_corpus(CorpusPaths::in_dir(testing::fixture("reference_counts")));
  for (auto rule : {CompositeRule::FirstPart, CompositeRule::LastPart}) {
    std::size_t total = 0;
    for (auto c : class_counts(corpus, ClassMap::standard(rule))) total += c;
    EXPECT_EQ(total, corpus.nuclei.size());
  }
}

}  // namespace
}  // namespace prosody
