#ifndef PROSODY_SYNTHGEN_HPP
#define PROSODY_SYNTHGEN_HPP

// Synthetic corpora with known class-conditional feature distributions,
// and the Bayes-rate oracles that go with them.
//
// Each nucleus draws a generic class, then a vowel duration, the duration
// of the consonant that follows it, an F0 level and an F0 slope from that
// class's distributions. The F0 track is sampled every 10 ms and is linear
// inside each vowel, unvoiced elsewhere.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "prosody/coding.hpp"
#include "prosody/config.hpp"
#include "prosody/corpus.hpp"
#include "prosody/error.hpp"
#include "prosody/features.hpp"
#include "prosody/tsv.hpp"

namespace prosody {

struct NormalDist {
  double mean = 0.0;
  double sd = 1.0;
};

/// Parameterized by the median (exp of the log-mean) and the log-sd.
struct LogNormalDist {
  double median = 0.1;
  double sigma = 0.2;
  double log_mean() const { return std::log(median); }
};

struct VoteModel {
  enum class Kind { Fixed, Uniform, Bernoulli };
  Kind kind = Kind::Fixed;
  unsigned count = 0;  ///< Fixed: votes given
  double p = 0.0;      ///< Bernoulli: probability all listeners vote
};

struct ClassDistributions {
  LogNormalDist vowel{0.07, 0.15};
  LogNormalDist gap{0.08, 0.3};
  NormalDist f0_level{120.0, 6.0};
  NormalDist f0_slope{0.0, 40.0};
  VoteModel frontier;
  VoteModel accent;
};

struct GenSpec {
  std::uint64_t seed = 1;
  std::size_t n_nuclei = 1699;
  unsigned n_listeners = kDefaultListeners;
  /// Indexed by GenericClass.
  std::array<double, kNumGenericClasses> class_weights{1287.0 / 1699, 105.0 / 1699, 50.0 / 1699, 128.0 / 1699,
                                                        129.0 / 1699};
  /// When set, exactly these class counts in shuffled order instead of sampling.
  std::optional<std::array<std::size_t, kNumGenericClasses>> class_counts;
  std::array<ClassDistributions, kNumGenericClasses> classes = default_classes();
  LogNormalDist lead{0.08, 0.3};
  /// Share of Nil nuclei that carry a mark mapping to Nil (L, S, U, V).
  double nil_mark_rate = 0.2;

  static std::array<ClassDistributions, kNumGenericClasses> default_classes() {
    std::array<ClassDistributions, kNumGenericClasses> c{};
    auto& nil = c[static_cast<std::size_t>(GenericClass::Nil)];
    auto& b = c[static_cast<std::size_t>(GenericClass::B)];
    auto& cc = c[static_cast<std::size_t>(GenericClass::C)];
    auto& p = c[static_cast<std::size_t>(GenericClass::P)];
    auto& r = c[static_cast<std::size_t>(GenericClass::R)];
    nil.f0_level = {120.0, 6.0};
    b.f0_level = {95.0, 6.0};
    b.f0_slope = {-150.0, 40.0};
    cc.vowel = {0.16, 0.15};
    cc.f0_level = {140.0, 6.0};
    cc.f0_slope = {300.0, 40.0};
    p.vowel = {0.10, 0.15};
    p.f0_level = {165.0, 6.0};
    r.f0_level = {140.0, 6.0};
    r.f0_slope = {150.0, 40.0};
    cc.frontier = {VoteModel::Kind::Fixed, 15, 0.0};
    b.frontier = {VoteModel::Kind::Fixed, 6, 0.0};
    p.accent = {VoteModel::Kind::Fixed, 12, 0.0};
    r.accent = {VoteModel::Kind::Fixed, 8, 0.0};
    return c;
  }

  ClassDistributions& of(GenericClass c) { return classes[static_cast<std::size_t>(c)]; }
  const ClassDistributions& of(GenericClass c) const { return classes[static_cast<std::size_t>(c)]; }

  void validate() const {
    if (n_nuclei < 1) throw ConfigError("n_nuclei must be positive");
    if (class_counts) {
      std::size_t total = 0;
      for (auto c : *class_counts) total += c;
      if (total != n_nuclei) throw ConfigError("class counts must add up to n_nuclei");
    } else {
      double sum = 0.0;
      for (double w : class_weights) {
        if (!(w >= 0.0)) throw ConfigError("class weights must be non-negative");
        sum += w;
      }
      if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("class weights must sum to 1");
    }
    auto positive = [](double v, const char* what) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be positive");
    };
    positive(lead.median, "lead median");
    positive(lead.sigma, "lead sigma");
    for (const auto& c : classes) {
      positive(c.vowel.median, "vowel median");
      positive(c.vowel.sigma, "vowel sigma");
      positive(c.gap.median, "gap median");
      positive(c.gap.sigma, "gap sigma");
      positive(c.f0_level.sd, "f0 sd");
      positive(c.f0_slope.sd, "slope sd");
      for (const auto* v : {&c.frontier, &c.accent}) {
        if (v->kind == VoteModel::Kind::Fixed && v->count > n_listeners)
          throw ConfigError("fixed vote count exceeds n_listeners");
        if (v->kind == VoteModel::Kind::Bernoulli && !(v->p >= 0.0 && v->p <= 1.0))
          throw ConfigError("bernoulli vote probability must be in [0,1]");
      }
    }
    if (!(nil_mark_rate >= 0.0 && nil_mark_rate <= 1.0)) throw ConfigError("nil_mark_rate must be in [0,1]");
  }
};

// ---------------------------------------------------------------------------
// Spec files

namespace detail {

inline std::vector<double> numbers(const std::string& key, const std::string& text, std::size_t n) {
  std::vector<double> out;
  std::string tok;
  auto flush = [&] {
    if (tok.empty()) return;
    auto v = tsv::to_double(tok);
    if (!v) throw ConfigError("key '" + key + "': not a number: '" + tok + "'");
    out.push_back(*v);
    tok.clear();
  };
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == ',')
      flush();
    else
      tok += c;
  }
  flush();
  if (out.size() != n) throw ConfigError("key '" + key + "' needs " + std::to_string(n) + " numbers");
  return out;
}

inline VoteModel vote_model(const std::string& key, const std::string& text) {
  if (text == "uniform") return {VoteModel::Kind::Uniform, 0, 0.0};
  if (text.starts_with("fixed:")) {
    auto v = tsv::to_int(text.substr(6));
    if (!v || *v < 0) throw ConfigError("key '" + key + "': bad vote count");
    return {VoteModel::Kind::Fixed, static_cast<unsigned>(*v), 0.0};
  }
  if (text.starts_with("bernoulli:")) {
    auto v = tsv::to_double(text.substr(10));
    if (!v) throw ConfigError("key '" + key + "': bad probability");
    return {VoteModel::Kind::Bernoulli, 0, *v};
  }
  throw ConfigError("key '" + key + "': expected fixed:N, uniform or bernoulli:P");
}

}  // namespace detail

/// Keys: seed, n_nuclei, n_listeners, nil_mark_rate, lead = MEDIAN SIGMA,
/// weight.CLS, count.CLS, and per class (CLS in Nil B C P R, or `all`):
/// vowel.CLS / gap.CLS = MEDIAN_S LOG_SIGMA, f0.CLS / slope.CLS = MEAN SD,
/// frontier.CLS / accent.CLS = fixed:N | uniform | bernoulli:P.
/// `.all` keys apply first, class-specific keys override them.
inline GenSpec gen_spec_from_config(const KeyValueConfig& cfg) {
  GenSpec s;
  s.seed = cfg.get_u64("seed", s.seed);
  auto n = cfg.get_int("n_nuclei", static_cast<long long>(s.n_nuclei));
  if (n < 1) throw ConfigError("n_nuclei must be positive");
  s.n_nuclei = static_cast<std::size_t>(n);
  auto nl = cfg.get_int("n_listeners", s.n_listeners);
  if (nl < 0) throw ConfigError("n_listeners must not be negative");
  s.n_listeners = static_cast<unsigned>(nl);
  s.nil_mark_rate = cfg.get_double("nil_mark_rate", s.nil_mark_rate);
  if (cfg.has("lead")) {
    auto v = detail::numbers("lead", cfg.get("lead", ""), 2);
    s.lead = {v[0], v[1]};
  }

  bool any_weight = false, any_count = false;
  std::array<double, kNumGenericClasses> weights{};
  std::array<std::size_t, kNumGenericClasses> counts{};
  for (auto c : kAllGenericClasses) {
    auto name = std::string(to_string(c));
    auto k = static_cast<std::size_t>(c);
    if (cfg.has("weight." + name)) {
      any_weight = true;
      weights[k] = cfg.get_double("weight." + name, 0.0);
    }
    if (cfg.has("count." + name)) {
      any_count = true;
      auto v = cfg.get_int("count." + name, 0);
      if (v < 0) throw ConfigError("count." + name + " must not be negative");
      counts[k] = static_cast<std::size_t>(v);
    }
  }
  if (any_weight && any_count) throw ConfigError("use either weight.* or count.* keys, not both");
  if (any_weight) {
    double sum = 0.0;
    for (double w : weights) sum += w;
    if (!(sum > 0.0)) throw ConfigError("class weights must have a positive sum");
    for (auto& w : weights) w /= sum;
    s.class_weights = weights;
  }
  if (any_count) {
    s.class_counts = counts;
    std::size_t total = 0;
    for (auto c : counts) total += c;
    if (!cfg.has("n_nuclei")) s.n_nuclei = total;
  }

  auto apply = [&](const std::string& suffix, ClassDistributions& d) {
    if (cfg.has("vowel." + suffix)) {
      auto v = detail::numbers("vowel." + suffix, cfg.get("vowel." + suffix, ""), 2);
      d.vowel = {v[0], v[1]};
    }
    if (cfg.has("gap." + suffix)) {
      auto v = detail::numbers("gap." + suffix, cfg.get("gap." + suffix, ""), 2);
      d.gap = {v[0], v[1]};
    }
    if (cfg.has("f0." + suffix)) {
      auto v = detail::numbers("f0." + suffix, cfg.get("f0." + suffix, ""), 2);
      d.f0_level = {v[0], v[1]};
    }
    if (cfg.has("slope." + suffix)) {
      auto v = detail::numbers("slope." + suffix, cfg.get("slope." + suffix, ""), 2);
      d.f0_slope = {v[0], v[1]};
    }
    if (cfg.has("frontier." + suffix)) d.frontier = detail::vote_model("frontier." + suffix, cfg.get("frontier." + suffix, ""));
    if (cfg.has("accent." + suffix)) d.accent = detail::vote_model("accent." + suffix, cfg.get("accent." + suffix, ""));
  };
  for (auto& d : s.classes) apply("all", d);
  for (auto c : kAllGenericClasses) apply(std::string(to_string(c)), s.of(c));

  static const char* kPrefixes[] = {"weight.", "count.", "vowel.", "gap.", "f0.", "slope.", "frontier.", "accent."};
  for (const auto& [key, value] : cfg.values()) {
    if (key == "seed" || key == "n_nuclei" || key == "n_listeners" || key == "nil_mark_rate" || key == "lead") continue;
    bool known = false;
    for (const char* p : kPrefixes) {
      std::string prefix = p;
      if (!key.starts_with(prefix)) continue;
      auto cls = key.substr(prefix.size());
      known = generic_class_from_string(cls).has_value() ||
              (cls == "all" && prefix != "weight." && prefix != "count.");
    }
    if (!known) throw ConfigError("unknown generator key '" + key + "'");
  }
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Generation

struct GeneratedCorpus {
  Corpus corpus;
  std::vector<GenericClass> truth;
};

inline constexpr double kF0Period = 0.01;

namespace detail {

inline std::int64_t duration_us(double seconds) {
  return std::max<std::int64_t>(1000, static_cast<std::int64_t>(std::llround(seconds * 1e6)));
}

inline unsigned draw_votes(const VoteModel& m, unsigned n_listeners, std::mt19937_64& rng) {
  switch (m.kind) {
    case VoteModel::Kind::Fixed: return m.count;
    case VoteModel::Kind::Uniform: return std::uniform_int_distribution<unsigned>(0, n_listeners)(rng);
    case VoteModel::Kind::Bernoulli: return std::bernoulli_distribution(m.p)(rng) ? n_listeners : 0;
  }
  return 0;
}

inline std::string draw_mark(GenericClass c, double nil_mark_rate, std::mt19937_64& rng) {
  static const std::vector<std::string> r = {"R", "R-", "R2"};
  static const std::vector<std::string> p = {"P", "P^", "P/", "P\\", "Ph"};
  static const std::vector<std::string> b = {"B", "B+Rc"};
  static const std::vector<std::string> nil = {"L", "L-", "L2", "S", "U", "V"};
  auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  switch (c) {
    case GenericClass::R: return pick(r);
    case GenericClass::P: return pick(p);
    case GenericClass::B: return pick(b);
    case GenericClass::C: return "Rc";
    case GenericClass::Nil: return std::bernoulli_distribution(nil_mark_rate)(rng) ? pick(nil) : std::string();
  }
  return {};
}

}  // namespace detail

/// Deterministic for a given spec (including its seed).
inline GeneratedCorpus generate(const GenSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  GeneratedCorpus out;
  auto& truth = out.truth;

  if (spec.class_counts) {
    for (auto c : kAllGenericClasses)
      truth.insert(truth.end(), (*spec.class_counts)[static_cast<std::size_t>(c)], c);
    std::shuffle(truth.begin(), truth.end(), rng);
  } else {
    std::discrete_distribution<int> pick(spec.class_weights.begin(), spec.class_weights.end());
    for (std::size_t i = 0; i < spec.n_nuclei; ++i) truth.push_back(static_cast<GenericClass>(pick(rng)));
  }

  static const char* kVowels[] = {"a", "e", "i", "o", "u", "E", "O", "y"};
  static const char* kConsonants[] = {"p", "t", "k", "b", "d", "g", "m", "n", "l", "R", "s", "f"};
  auto label = [&](auto& table) {
    return std::string(table[std::uniform_int_distribution<std::size_t>(0, std::size(table) - 1)(rng)]);
  };
  auto lognormal = [&](const LogNormalDist& d) {
    return std::lognormal_distribution<double>(d.log_mean(), d.sigma)(rng);
  };
  auto normal = [&](const NormalDist& d) { return std::normal_distribution<double>(d.mean, d.sd)(rng); };

  auto& corpus = out.corpus;
  corpus.n_listeners = spec.n_listeners;
  std::vector<double> level_v(truth.size()), slope_v(truth.size());

  std::int64_t t = 0;
  auto emit = [&](std::int64_t dur, std::string lab, bool vowel) {
    corpus.segments.push_back({static_cast<double>(t) / 1e6, static_cast<double>(t + dur) / 1e6, std::move(lab), vowel});
    t += dur;
  };
  emit(detail::duration_us(lognormal(spec.lead)), label(kConsonants), false);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto& d = spec.of(truth[i]);
    auto v = detail::duration_us(lognormal(d.vowel));
    auto g = detail::duration_us(lognormal(d.gap));
    level_v[i] = normal(d.f0_level);
    slope_v[i] = normal(d.f0_slope);

    VocalicNucleus n;
    n.index = i;
    emit(v, label(kVowels), true);
    n.segment = corpus.segments.back();
    emit(g, label(kConsonants), false);

    auto mark = detail::draw_mark(truth[i], spec.nil_mark_rate, rng);
    if (!mark.empty()) n.expert_marks.push_back(parse_mark(mark));
    n.frontier_votes = detail::draw_votes(d.frontier, spec.n_listeners, rng);
    n.accent_votes = detail::draw_votes(d.accent, spec.n_listeners, rng);
    corpus.nuclei.push_back(std::move(n));
  }

  // F0 on a 10 ms grid: linear within vowels around the vowel midpoint.
  const double end = corpus.end_time();
  std::size_t nucleus = 0;
  for (std::int64_t k = 0;; ++k) {
    double time = static_cast<double>(k) * kF0Period;
    if (time > end) break;
    while (nucleus < corpus.nuclei.size() && corpus.nuclei[nucleus].segment.end <= time) ++nucleus;
    double f0 = 0.0;
    if (nucleus < corpus.nuclei.size()) {
      const auto& seg = corpus.nuclei[nucleus].segment;
      if (time >= seg.start && time < seg.end) {
        double mid = 0.5 * (seg.start + seg.end);
        f0 = level_v[nucleus] + slope_v[nucleus] * (time - mid);
        if (f0 < 1.0) f0 = 0.0;
      }
    }
    corpus.f0.samples.push_back({time, f0});
  }
  return out;
}

inline void write_truth(std::ostream& out, const std::vector<GenericClass>& truth) {
  out << "# nucleus_index\tclass\n";
  for (std::size_t i = 0; i < truth.size(); ++i) out << i << '\t' << to_string(truth[i]) << '\n';
}

/// The four corpus files plus truth.tsv.
inline void save_generated(const std::filesystem::path& dir, const GeneratedCorpus& g) {
  save_corpus(dir, g.corpus);
  std::ofstream out(dir / "truth.tsv", std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + (dir / "truth.tsv").string());
  write_truth(out, g.truth);
}

// ---------------------------------------------------------------------------
// Oracles

/// One class's distribution along one feature axis. sd == 0 is a point mass.
struct AxisDist {
  enum class Family { Normal, LogNormal };
  Family family = Family::Normal;
  double location = 0.0;  ///< mean, or log-mean for LogNormal
  double scale = 1.0;     ///< sd, or log-sd for LogNormal

  static AxisDist normal(double mean, double sd) { return {Family::Normal, mean, sd}; }
  static AxisDist lognormal(double log_mean, double log_sd) { return {Family::LogNormal, log_mean, log_sd}; }
};

/// Classes with independent per-axis distributions: axes[d][k].
struct OracleProblem {
  std::vector<double> weights;
  std::vector<std::vector<AxisDist>> axes;
};

struct BayesResult {
  double accuracy = 0.0;
  std::vector<double> class_error;  ///< P(decision != k | class k); 1 for zero-weight classes
};

namespace detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace detail

/// Bayes-optimal (MAP) accuracy by integrating the class densities over a
/// fine grid of cells whose per-class masses come from exact normal CDFs.
/// Supports up to three continuous axes; an axis must be all point masses
/// or all continuous.
inline BayesResult bayes_oracle(const OracleProblem& problem) {
  const std::size_t K = problem.weights.size();
  if (K == 0) throw ConfigError("oracle needs at least one class");
  for (const auto& axis : problem.axes)
    if (axis.size() != K) throw ConfigError("oracle axis does not list every class");

  struct Axis {
    std::vector<double> loc, sd;
  };
  std::vector<Axis> continuous;
  std::vector<std::vector<double>> atoms(K);  // point-mass coordinates per class
  for (const auto& axis : problem.axes) {
    auto fam = axis.front().family;
    std::size_t zero = 0;
    for (const auto& d : axis) {
      if (d.family != fam) throw ConfigError("unsupported family: mixed normal/lognormal on one axis");
      if (d.scale < 0.0) throw ConfigError("negative scale");
      if (d.scale == 0.0) ++zero;
    }
    if (zero == K) {
      for (std::size_t k = 0; k < K; ++k) atoms[k].push_back(axis[k].location);
      continue;
    }
    if (zero != 0) throw ConfigError("unsupported family: point mass mixed with a continuous density");
    Axis a;
    for (const auto& d : axis) {
      a.loc.push_back(d.location);  // lognormal axes integrate in log space
      a.sd.push_back(d.scale);
    }
    continuous.push_back(std::move(a));
  }
  const std::size_t D = continuous.size();
  if (D > 3) throw ConfigError("unsupported: more than 3 continuous oracle axes");
  static constexpr std::size_t kCells[] = {1, 20000, 1200, 200};
  const std::size_t N = kCells[D];

  // masses[d][k][j]: probability of cell j along axis d under class k.
  std::vector<std::vector<std::vector<double>>> masses(D);
  for (std::size_t d = 0; d < D; ++d) {
    const auto& a = continuous[d];
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t k = 0; k < K; ++k) {
      lo = std::min(lo, a.loc[k] - 9.0 * a.sd[k]);
      hi = std::max(hi, a.loc[k] + 9.0 * a.sd[k]);
    }
    masses[d].assign(K, std::vector<double>(N));
    for (std::size_t k = 0; k < K; ++k) {
      double prev = 0.0;
      for (std::size_t j = 0; j < N; ++j) {
        double edge = lo + (hi - lo) * static_cast<double>(j + 1) / static_cast<double>(N);
        double cdf = j + 1 == N ? 1.0 : detail::normal_cdf((edge - a.loc[k]) / a.sd[k]);
        masses[d][k][j] = cdf - prev;
        prev = cdf;
      }
    }
  }

  std::vector<double> hit(K, 0.0);
  std::vector<bool> grouped(K, false);
  for (std::size_t k0 = 0; k0 < K; ++k0) {
    if (grouped[k0]) continue;
    std::vector<std::size_t> group;
    for (std::size_t k = k0; k < K; ++k)
      if (!grouped[k] && atoms[k] == atoms[k0]) {
        group.push_back(k);
        grouped[k] = true;
      }
    std::size_t total = 1;
    for (std::size_t d = 0; d < D; ++d) total *= N;
    std::vector<std::size_t> idx(D, 0);
    for (std::size_t cell = 0; cell < total; ++cell) {
      std::size_t best = group.front();
      double best_mass = -1.0, best_cond = 0.0;
      for (auto k : group) {
        double cond = 1.0;
        for (std::size_t d = 0; d < D; ++d) cond *= masses[d][k][idx[d]];
        double mass = problem.weights[k] * cond;
        if (mass > best_mass) {
          best_mass = mass;
          best = k;
          best_cond = cond;
        }
      }
      hit[best] += best_cond;
      for (std::size_t d = D; d-- > 0;) {
        if (++idx[d] < N) break;
        idx[d] = 0;
      }
    }
  }

  BayesResult r;
  r.class_error.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    r.accuracy += problem.weights[k] * hit[k];
    r.class_error[k] = 1.0 - hit[k];
  }
  return r;
}

/// Oracle over a nucleus's own features as drawn by the generator.
/// Pseudo-syllable duration is accepted only when the gap distribution is
/// the same for every class (it then carries no class information).
inline OracleProblem oracle_problem(const GenSpec& spec, const FeatureSelection& features) {
  OracleProblem p;
  if (spec.class_counts) {
    double total = 0.0;
    for (auto c : *spec.class_counts) total += static_cast<double>(c);
    for (auto c : *spec.class_counts) p.weights.push_back(static_cast<double>(c) / total);
  } else {
    p.weights.assign(spec.class_weights.begin(), spec.class_weights.end());
  }
  for (auto f : features) {
    std::vector<AxisDist> axis;
    switch (f) {
      case Feature::VowelDuration:
        for (const auto& c : spec.classes) axis.push_back(AxisDist::lognormal(c.vowel.log_mean(), c.vowel.sigma));
        break;
      case Feature::F0Mean:
        for (const auto& c : spec.classes) axis.push_back(AxisDist::normal(c.f0_level.mean, c.f0_level.sd));
        break;
      case Feature::F0Slope:
        for (const auto& c : spec.classes) axis.push_back(AxisDist::normal(c.f0_slope.mean, c.f0_slope.sd));
        break;
      case Feature::PseudoSyllableDuration: {
        const auto& g0 = spec.classes.front().gap;
        for (const auto& c : spec.classes)
          if (c.gap.median != g0.median || c.gap.sigma != g0.sigma)
            throw ConfigError("unsupported family: pseudo-syllable duration with class-dependent gaps");
        continue;
      }
      default:
        throw ConfigError("unsupported family for oracle feature '" + std::string(to_string(f)) + "'");
    }
    p.axes.push_back(std::move(axis));
  }
  return p;
}

inline BayesResult bayes_oracle(const GenSpec& spec, const FeatureSelection& features) {
  return bayes_oracle(oracle_problem(spec, features));
}

struct ThresholdOracle {
  double threshold = 0.0;
  double error_low = 0.0;   ///< P(x > threshold | low class)
  double error_high = 0.0;  ///< P(x <= threshold | high class)
  double balanced_error() const { return 0.5 * (error_low + error_high); }
};

/// Exhaustive scan of single thresholds between two continuous 1-D
/// distributions of the same family; keeps the one with the lowest
/// balanced error ("high" is the class with the larger location).
inline ThresholdOracle threshold_oracle(const AxisDist& low, const AxisDist& high, std::size_t steps = 200001) {
  if (low.family != high.family) throw ConfigError("unsupported family: mixed families");
  if (!(low.scale > 0.0 && high.scale > 0.0)) throw ConfigError("threshold oracle needs continuous densities");
  double lo = std::min(low.location - 9 * low.scale, high.location - 9 * high.scale);
  double hi = std::max(low.location + 9 * low.scale, high.location + 9 * high.scale);
  ThresholdOracle best;
  double best_err = 2.0;
  for (std::size_t i = 0; i < steps; ++i) {
    double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
    double el = 1.0 - detail::normal_cdf((t - low.location) / low.scale);
    double eh = detail::normal_cdf((t - high.location) / high.scale);
    if (0.5 * (el + eh) < best_err) {
      best_err = 0.5 * (el + eh);
      best = {low.family == AxisDist::Family::LogNormal ? std::exp(t) : t, el, eh};
    }
  }
  return best;
}

}  // namespace prosody

#endif  // PROSODY_SYNTHGEN_HPP
