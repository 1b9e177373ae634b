#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <string>

#include "prosody/corpus.hpp"
#include "prosody/synthgen.hpp"
#include "test_util.hpp"

namespace prosody {
namespace {

std::vector<PhoneticSegment> segs(const std::string& text) {
  std::istringstream in(text);
  return parse_segmentation(in);
}

F0Track f0(const std::string& text) {
  std::istringstream in(text);
  return parse_f0(in);
}

template <class Fn>
std::string error_of(Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

TEST(LoadSegmentation, TwoSegments) {
  auto s = segs("0.00\t0.12\tb\t0\n0.12\t0.30\ta\t1\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_FALSE(s[0].is_vowel);
  EXPECT_TRUE(s[1].is_vowel);
  EXPECT_EQ(s[1].label, "a");
  EXPECT_DOUBLE_EQ(s[1].start, 0.12);
  EXPECT_DOUBLE_EQ(s[1].end, 0.30);
}

TEST(LoadSegmentation, CommentsAndBlankLinesSkipped) {
  auto s = segs("# header\n\n0.0\t0.1\tp\t0\r\n");
  EXPECT_EQ(s.size(), 1u);
}

TEST(LoadSegmentation, UnsortedReportsLine) {
  auto msg = error_of([] { segs("0.50\t0.60\ta\t1\n0.10\t0.20\tb\t0\n"); });
  EXPECT_NE(msg.find("unsorted at line 2"), std::string::npos) << msg;
}

TEST(LoadSegmentation, InvariantViolations) {
  EXPECT_THROW(segs("0.10\t0.10\ta\t1\n"), FormatError);          // end <= start
  EXPECT_THROW(segs("0.00\t0.20\ta\t1\n0.10\t0.30\tb\t0\n"), FormatError);  // overlap
  EXPECT_THROW(segs("0.00\t0.20\ta\t2\n"), FormatError);
  EXPECT_THROW(segs("0.00\t0.20\ta\n"), FormatError);
  EXPECT_THROW(segs("x\t0.20\ta\t1\n"), FormatError);
  EXPECT_THROW(segs("-0.1\t0.20\ta\t1\n"), FormatError);
  try {
    segs("0\t1\ta\t1\n# c\n1\t0.5\tb\t0\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(LoadSegmentation, TouchingSegmentsAllowed) { EXPECT_NO_THROW(segs("0\t0.1\tp\t0\n0.1\t0.2\ta\t1\n")); }

TEST(LoadF0, Samples) {
  auto t = f0("0.00\t110.0\n0.01\t112.0\n");
  ASSERT_EQ(t.samples.size(), 2u);
  EXPECT_DOUBLE_EQ(t.samples[1].f0, 112.0);
}

TEST(LoadF0, ZeroIsUnvoiced) {
  auto t = f0("0.00\t0\n");
  ASSERT_EQ(t.samples.size(), 1u);
  EXPECT_FALSE(t.samples[0].voiced());
}

TEST(LoadF0, Errors) {
  auto msg = error_of([] { f0("0.02\t-5\n"); });
  EXPECT_NE(msg.find("negative F0 at line 1"), std::string::npos) << msg;
  EXPECT_THROW(f0("0.02\t100\n0.02\t100\n"), FormatError);
  EXPECT_THROW(f0("0.02\t100\n0.01\t100\n"), FormatError);
  EXPECT_THROW(f0("0.02\tnan\n"), FormatError);
  EXPECT_THROW(f0("0.02\tinf\n"), FormatError);
}

TEST(ExtractNuclei, OneVowelAmongConsonants) {
  auto s = segs("0\t0.1\tp\t0\n0.1\t0.2\ta\t1\n0.2\t0.3\tt\t0\n");
  auto n = extract_nuclei(s, {}, {}, 17);
  ASSERT_EQ(n.size(), 1u);
  EXPECT_EQ(n[0].segment, s[1]);
}

TEST(ExtractNuclei, MarksAttachByIndex) {
  auto s = segs("0\t0.1\tp\t0\n0.1\t0.2\ta\t1\n0.2\t0.3\tt\t0\n0.3\t0.4\ti\t1\n");
  std::istringstream marks("1\tP\n");
  auto n = extract_nuclei(s, parse_expert_marks(marks), {}, 17);
  ASSERT_EQ(n.size(), 2u);
  EXPECT_TRUE(n[0].expert_marks.empty());
  ASSERT_EQ(n[1].expert_marks.size(), 1u);
  EXPECT_EQ(render_mark(n[1].expert_marks[0]), "P");
  EXPECT_EQ(n[1].index, 1u);
}

TEST(ExtractNuclei, Votes) {
  auto s = segs("0\t0.1\ta\t1\n");
  std::istringstream votes("0\t3\t5\n");
  auto n = extract_nuclei(s, {}, parse_listener_votes(votes).entries, 17);
  EXPECT_EQ(n[0].frontier_votes, 3u);
  EXPECT_EQ(n[0].accent_votes, 5u);
}

TEST(ExtractNuclei, Errors) {
  auto s = segs("0\t0.1\ta\t1\n");
  std::istringstream too_many("0\t18\t0\n");
  EXPECT_THROW(extract_nuclei(s, {}, parse_listener_votes(too_many).entries, 17), FormatError);
  std::istringstream out_of_range("1\tP\n");
  EXPECT_THROW(extract_nuclei(s, parse_expert_marks(out_of_range), {}, 17), FormatError);
  std::istringstream dup("0\t1\t1\n0\t2\t2\n");
  EXPECT_THROW(extract_nuclei(s, {}, parse_listener_votes(dup).entries, 17), FormatError);
  std::istringstream bad_mark("0\tQ\n");
  EXPECT_THROW(parse_expert_marks(bad_mark), FormatError);
}

TEST(ExpertMarks, EscapedBackslash) {
  std::istringstream in("0\tP\\\\\n");
  auto m = parse_expert_marks(in);
  EXPECT_EQ(m[0].mark.parts[0].modifier, PeakModifier::Backslash);
}

TEST(ListenerVotes, HeaderCarriesListenerCount) {
  std::istringstream in("# n_listeners=20\n0\t19\t0\n");
  auto t = parse_listener_votes(in);
  EXPECT_EQ(t.n_listeners, 20u);
}

// Random corpora on a microsecond grid, including odd times that need the
// exact-repr fallback in the writer.
Corpus random_corpus(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dur(0.001, 0.3);
  std::bernoulli_distribution vowel(0.5);
  Corpus c;
  c.n_listeners = 17;
  double t = 0.0;
  std::size_t n = 1 + rng() % 40;
  for (std::size_t i = 0; i < n; ++i) {
    double d = dur(rng);
    c.segments.push_back({t, t + d, vowel(rng) ? "a" : "t", false});
    c.segments.back().is_vowel = c.segments.back().label == "a";
    t += d + (rng() % 3 == 0 ? dur(rng) : 0.0);
  }
  for (double time = 0.0; time < t; time += 0.0137) c.f0.samples.push_back({time, rng() % 4 == 0 ? 0.0 : 80.0 + dur(rng) * 300});
  static const char* marks[] = {"P", "R-", "B+Rc", "P\\", "L3", "Ph+R2"};
  for (const auto& s : c.segments) {
    if (!s.is_vowel) continue;
    VocalicNucleus v;
    v.index = c.nuclei.size();
    v.segment = s;
    if (rng() % 3 == 0) v.expert_marks.push_back(parse_mark(marks[rng() % 6]));
    if (rng() % 5 == 0) v.expert_marks.push_back(parse_mark(marks[rng() % 6]));
    v.frontier_votes = static_cast<unsigned>(rng() % 18);
    v.accent_votes = static_cast<unsigned>(rng() % 18);
    c.nuclei.push_back(std::move(v));
  }
  return c;
}

TEST(CorpusIo, SaveLoadRoundTripProperty) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    auto c = random_corpus(seed);
    testing::TempDir dir;
    save_corpus(dir.path(), c);
    auto back = load_corpus(CorpusPaths::in_dir(dir.path()));
    EXPECT_EQ(back, c) << "seed " << seed;
  }
}

TEST(CorpusIo, NucleusCountEqualsVowelCount) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    auto c = random_corpus(seed);
    std::size_t vowels = 0;
    for (const auto& s : c.segments) vowels += s.is_vowel;
    auto n = extract_nuclei(c.segments, {}, {}, 17);
    EXPECT_EQ(n.size(), vowels);
    for (std::size_t i = 0; i < n.size(); ++i) EXPECT_EQ(n[i].index, i);
  }
}

TEST(CorpusIo, OptionalTiers) {
  testing::TempDir dir;
  testing::write_text(dir / "segments.tsv", "0\t0.1\ta\t1\n");
  testing::write_text(dir / "f0.tsv", "0\t100\n");
  auto c = load_corpus(CorpusPaths::in_dir(dir.path()));
  EXPECT_EQ(c.nuclei.size(), 1u);
  EXPECT_EQ(c.n_listeners, 17u);
  EXPECT_THROW(load_segmentation((dir / "missing.tsv").string()), DataError);
}

}  // namespace
}  // namespace prosody
