#ifndef PROSODY_FEATURES_HPP
#define PROSODY_FEATURES_HPP

// Per-nucleus acoustic features and normalized context windows.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prosody/corpus.hpp"
#include "prosody/error.hpp"
#include "prosody/tsv.hpp"

namespace prosody {

struct NucleusFeatures {
  double vowel_duration = 0.0;
  double pseudo_syllable_duration = 0.0;
  double f0_mean = 0.0;
  double f0_slope = 0.0;
  bool valid_f0 = false;
};

struct F0Stats {
  double mean = 0.0;
  double slope = 0.0;
  bool valid = false;
};

struct FeatureOptions {
  /// Report F0 in semitones relative to 100 Hz instead of Hz.
  bool semitones = false;
};

/// Time from the end of nucleus i to the end of the next one. The last
/// nucleus measures to the end of the utterance, or falls back to its own
/// duration when it closes the utterance.
inline double pseudo_syllable_duration(std::span<const VocalicNucleus> nuclei, std::size_t i, double utterance_end) {
  if (i >= nuclei.size()) throw DataError("nucleus index out of range");
  if (i + 1 < nuclei.size()) return nuclei[i + 1].segment.end - nuclei[i].segment.end;
  double tail = utterance_end - nuclei[i].segment.end;
  return tail > 0.0 ? tail : nuclei[i].segment.duration();
}

inline double pseudo_syllable_duration(const Corpus& corpus, std::size_t i) {
  return pseudo_syllable_duration(std::span<const VocalicNucleus>(corpus.nuclei), i, corpus.end_time());
}

/// Mean and least-squares slope of the voiced samples inside [start, end].
inline F0Stats f0_stats(const F0Track& track, const PhoneticSegment& segment, const FeatureOptions& options = {}) {
  const auto& s = track.samples;
  auto first = std::lower_bound(s.begin(), s.end(), segment.start,
                                [](const F0Sample& x, double t) { return x.time < t; });
  std::vector<std::pair<double, double>> pts;
  for (auto it = first; it != s.end() && it->time <= segment.end; ++it) {
    if (!it->voiced()) continue;
    double v = options.semitones ? 12.0 * std::log2(it->f0 / 100.0) : it->f0;
    pts.emplace_back(it->time, v);
  }
  F0Stats out;
  if (pts.empty()) return out;
  out.valid = true;
  double tm = 0.0, fm = 0.0;
  for (auto [t, f] : pts) {
    tm += t;
    fm += f;
  }
  tm /= static_cast<double>(pts.size());
  fm /= static_cast<double>(pts.size());
  out.mean = fm;
  if (pts.size() >= 2) {
    double sxy = 0.0, sxx = 0.0;
    for (auto [t, f] : pts) {
      sxy += (t - tm) * (f - fm);
      sxx += (t - tm) * (t - tm);
    }
    out.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  return out;
}

inline std::vector<NucleusFeatures> compute_features(const Corpus& corpus, const FeatureOptions& options = {}) {
  std::vector<NucleusFeatures> out(corpus.nuclei.size());
  for (std::size_t i = 0; i < corpus.nuclei.size(); ++i) {
    const auto& n = corpus.nuclei[i];
    auto stats = f0_stats(corpus.f0, n.segment, options);
    out[i].vowel_duration = n.segment.duration();
    out[i].pseudo_syllable_duration = pseudo_syllable_duration(corpus, i);
    out[i].f0_mean = stats.mean;
    out[i].f0_slope = stats.slope;
    out[i].valid_f0 = stats.valid;
  }
  return out;
}

/// Debug export, pre-normalization.
inline void write_features(std::ostream& out, const std::vector<NucleusFeatures>& features) {
  out << "# nucleus_index\tvowel_dur\tpseudo_syll_dur\tf0_mean\tf0_slope\tvalid_f0\n";
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& f = features[i];
    out << i << '\t' << tsv::fixed(f.vowel_duration) << '\t' << tsv::fixed(f.pseudo_syllable_duration) << '\t'
        << tsv::fixed(f.f0_mean) << '\t' << tsv::fixed(f.f0_slope) << '\t' << (f.valid_f0 ? 1 : 0) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Feature selection

enum class Feature {
  VowelDuration,
  PseudoSyllableDuration,
  F0Mean,
  F0Slope,
  ValidF0,
  DeltaVowelDuration,
  DeltaPseudoSyllableDuration,
  DeltaF0Mean,
  DeltaF0Slope,
};

inline constexpr Feature kAllFeatures[] = {
    Feature::VowelDuration,      Feature::PseudoSyllableDuration,      Feature::F0Mean,
    Feature::F0Slope,            Feature::ValidF0,                     Feature::DeltaVowelDuration,
    Feature::DeltaPseudoSyllableDuration, Feature::DeltaF0Mean,        Feature::DeltaF0Slope,
};

inline std::string_view to_string(Feature f) {
  switch (f) {
    case Feature::VowelDuration: return "vowel_dur";
    case Feature::PseudoSyllableDuration: return "pseudo_syll_dur";
    case Feature::F0Mean: return "f0_mean";
    case Feature::F0Slope: return "f0_slope";
    case Feature::ValidF0: return "valid_f0";
    case Feature::DeltaVowelDuration: return "d_vowel_dur";
    case Feature::DeltaPseudoSyllableDuration: return "d_pseudo_syll_dur";
    case Feature::DeltaF0Mean: return "d_f0_mean";
    case Feature::DeltaF0Slope: return "d_f0_slope";
  }
  return "?";
}

inline Feature feature_from_string(std::string_view s) {
  for (auto f : kAllFeatures)
    if (to_string(f) == s) return f;
  throw ConfigError("unknown feature '" + std::string(s) + "'");
}

using FeatureSelection = std::vector<Feature>;

/// Vowel duration, F0 mean and pseudo-syllable duration.
inline FeatureSelection default_mark_features() {
  return {Feature::VowelDuration, Feature::F0Mean, Feature::PseudoSyllableDuration};
}

inline FeatureSelection duration_features() { return {Feature::VowelDuration}; }

/// Comma separated feature names, e.g. "vowel_dur,f0_mean".
inline FeatureSelection parse_feature_selection(std::string_view text) {
  FeatureSelection out;
  for (const auto& name : tsv::split(text, ',')) {
    if (name.empty()) continue;
    auto f = feature_from_string(name);
    if (std::find(out.begin(), out.end(), f) != out.end()) throw ConfigError("feature '" + name + "' listed twice");
    out.push_back(f);
  }
  if (out.empty()) throw ConfigError("empty feature selection");
  return out;
}

inline std::string render_feature_selection(const FeatureSelection& sel) {
  std::string out;
  for (std::size_t i = 0; i < sel.size(); ++i) {
    if (i > 0) out += ',';
    out += to_string(sel[i]);
  }
  return out;
}

/// Raw (unnormalized) values of the selected features, one row per nucleus.
struct FeatureMatrix {
  FeatureSelection columns;
  std::vector<std::vector<double>> rows;
};

namespace detail {

inline double base_value(const NucleusFeatures& f, Feature which) {
  switch (which) {
    case Feature::VowelDuration:
    case Feature::DeltaVowelDuration: return f.vowel_duration;
    case Feature::PseudoSyllableDuration:
    case Feature::DeltaPseudoSyllableDuration: return f.pseudo_syllable_duration;
    case Feature::F0Mean:
    case Feature::DeltaF0Mean: return f.f0_mean;
    case Feature::F0Slope:
    case Feature::DeltaF0Slope: return f.f0_slope;
    case Feature::ValidF0: return f.valid_f0 ? 1.0 : 0.0;
  }
  return 0.0;
}

inline bool is_delta(Feature f) {
  return f == Feature::DeltaVowelDuration || f == Feature::DeltaPseudoSyllableDuration ||
         f == Feature::DeltaF0Mean || f == Feature::DeltaF0Slope;
}

}  // namespace detail

/// Deltas are first differences with the previous nucleus (0 for the first).
inline FeatureMatrix select_features(const std::vector<NucleusFeatures>& features, const FeatureSelection& selection) {
  FeatureMatrix m;
  m.columns = selection;
  m.rows.assign(features.size(), std::vector<double>(selection.size(), 0.0));
  for (std::size_t i = 0; i < features.size(); ++i) {
    for (std::size_t j = 0; j < selection.size(); ++j) {
      double v = detail::base_value(features[i], selection[j]);
      if (detail::is_delta(selection[j])) v = i == 0 ? 0.0 : v - detail::base_value(features[i - 1], selection[j]);
      m.rows[i][j] = v;
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Normalization

/// Per-feature z-score statistics from the training split (population std).
/// Features with zero spread are marked as dropped.
struct NormStats {
  FeatureSelection features;
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<bool> kept;

  std::size_t kept_count() const { return static_cast<std::size_t>(std::count(kept.begin(), kept.end(), true)); }

  std::vector<std::string> dropped_names() const {
    std::vector<std::string> out;
    for (std::size_t j = 0; j < features.size(); ++j)
      if (!kept[j]) out.emplace_back(to_string(features[j]));
    return out;
  }

  /// Normalized values of the kept features.
  std::vector<double> apply(std::span<const double> raw) const {
    if (raw.size() != features.size()) throw DataError("feature row does not match normalization statistics");
    std::vector<double> out;
    out.reserve(kept_count());
    for (std::size_t j = 0; j < raw.size(); ++j)
      if (kept[j]) out.push_back((raw[j] - mean[j]) / stddev[j]);
    return out;
  }

  bool operator==(const NormStats&) const = default;
};

/// Statistics over rows [begin, end) of the matrix.
inline NormStats fit_norm_stats(const FeatureMatrix& matrix, std::size_t begin, std::size_t end) {
  if (end > matrix.rows.size() || begin > end) throw DataError("normalization range out of bounds");
  const std::size_t n = end - begin;
  if (n < 2) throw DataError("normalization needs at least 2 training nuclei");
  const std::size_t d = matrix.columns.size();
  NormStats s;
  s.features = matrix.columns;
  s.mean.assign(d, 0.0);
  s.stddev.assign(d, 0.0);
  s.kept.assign(d, true);
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += matrix.rows[i][j];
    double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = begin; i < end; ++i) ss += (matrix.rows[i][j] - mean) * (matrix.rows[i][j] - mean);
    s.mean[j] = mean;
    s.stddev[j] = std::sqrt(ss / static_cast<double>(n));
    if (!(s.stddev[j] > 0.0)) s.kept[j] = false;
  }
  return s;
}

inline NormStats fit_norm_stats(const FeatureMatrix& matrix) { return fit_norm_stats(matrix, 0, matrix.rows.size()); }

// ---------------------------------------------------------------------------
// Context windows

struct FeatureWindow {
  std::size_t center = 0;
  std::size_t width = 1;
  std::vector<double> values;  ///< width x kept features, slot-major
  std::vector<bool> pad_mask;  ///< true = real nucleus
};

inline void check_window_width(long long width) {
  if (width < 1) throw ConfigError("window must be at least 1");
  if (width % 2 == 0) throw ConfigError("window must be odd");
}

/// One centered window per nucleus. Slots past either end of the utterance
/// are zero (the mean after z-scoring) and flagged in pad_mask.
inline std::vector<FeatureWindow> build_windows(const FeatureMatrix& matrix, std::size_t width, const NormStats& norm) {
  check_window_width(static_cast<long long>(width));
  if (norm.features != matrix.columns) throw DataError("feature selection does not match normalization statistics");
  const std::size_t n = matrix.rows.size();
  const std::size_t per = norm.kept_count();
  std::vector<std::vector<double>> normalized(n);
  for (std::size_t i = 0; i < n; ++i) normalized[i] = norm.apply(matrix.rows[i]);

  const auto half = static_cast<long long>(width / 2);
  std::vector<FeatureWindow> out(n);
  for (std::size_t c = 0; c < n; ++c) {
    auto& w = out[c];
    w.center = c;
    w.width = width;
    w.values.assign(width * per, 0.0);
    w.pad_mask.assign(width, false);
    for (long long off = -half; off <= half; ++off) {
      auto pos = static_cast<long long>(c) + off;
      auto slot = static_cast<std::size_t>(off + half);
      if (pos < 0 || pos >= static_cast<long long>(n)) continue;
      w.pad_mask[slot] = true;
      std::copy(normalized[pos].begin(), normalized[pos].end(), w.values.begin() + slot * per);
    }
  }
  return out;
}

inline std::vector<FeatureWindow> build_windows(const Corpus& corpus, std::size_t width,
                                                const FeatureSelection& selection, const NormStats& norm,
                                                const FeatureOptions& options = {}) {
  return build_windows(select_features(compute_features(corpus, options), selection), width, norm);
}

}  // namespace prosody

#endif  // PROSODY_FEATURES_HPP
