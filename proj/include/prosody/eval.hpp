#ifndef PROSODY_EVAL_HPP
#define PROSODY_EVAL_HPP

// Chronological splitting, the three experiment protocols, and confusion
// tabulation.

#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "prosody/coding.hpp"
#include "prosody/corpus.hpp"
#include "prosody/error.hpp"
#include "prosody/features.hpp"
#include "prosody/labels.hpp"
#include "prosody/mlp.hpp"
#include "prosody/tsv.hpp"

namespace prosody {

// ---------------------------------------------------------------------------
// Split

/// Half-open nucleus index range.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
  bool operator==(const IndexRange&) const = default;
};

struct Split {
  IndexRange train;
  IndexRange test;
  double fraction = 0.25;
};

/// The first floor(n * test_fraction) nuclei are the test set, the rest train.
/// With test_first = false the test set is the last share instead.
inline Split chronological_split(std::size_t n, double test_fraction, bool test_first = true) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test fraction must be in (0,1)");
  if (n < 2) throw DataError("need at least 2 nuclei to split, got " + std::to_string(n));
  auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(n) * test_fraction));
  if (n_test == 0 || n_test >= n)
    throw DataError("degenerate split: " + std::to_string(n_test) + " test of " + std::to_string(n) + " nuclei");
  Split s;
  s.fraction = test_fraction;
  if (test_first) {
    s.test = {0, n_test};
    s.train = {n_test, n};
  } else {
    s.train = {0, n - n_test};
    s.test = {n - n_test, n};
  }
  return s;
}

inline Split chronological_split(const Corpus& corpus, double test_fraction, bool test_first = true) {
  return chronological_split(corpus.nuclei.size(), test_fraction, test_first);
}

// ---------------------------------------------------------------------------
// Confusion report

/// Rows are expected classes, columns answered classes; abstentions are
/// counted per expected class.
class ConfusionReport {
 public:
  ConfusionReport() = default;
  explicit ConfusionReport(std::vector<std::string> class_names)
      : names_(std::move(class_names)),
        matrix_(names_.size(), std::vector<std::size_t>(names_.size(), 0)),
        no_answer_(names_.size(), 0) {}

  void add(std::size_t expected, std::optional<std::size_t> answer) {
    if (expected >= names_.size() || (answer && *answer >= names_.size()))
      throw DataError("class index out of range in confusion tabulation");
    if (answer)
      ++matrix_[expected][*answer];
    else
      ++no_answer_[expected];
    ++total_;
  }

  const std::vector<std::string>& class_names() const { return names_; }
  std::size_t num_classes() const { return names_.size(); }
  std::size_t cell(std::size_t expected, std::size_t answered) const { return matrix_.at(expected).at(answered); }
  const std::vector<std::vector<std::size_t>>& matrix() const { return matrix_; }
  const std::vector<std::size_t>& no_answer() const { return no_answer_; }
  std::size_t total() const { return total_; }

  std::size_t answers() const {
    std::size_t a = 0;
    for (const auto& row : matrix_)
      for (auto c : row) a += c;
    return a;
  }

  std::size_t correct() const {
    std::size_t c = 0;
    for (std::size_t k = 0; k < names_.size(); ++k) c += matrix_[k][k];
    return c;
  }

  std::size_t answered_for(std::size_t expected) const {
    std::size_t a = 0;
    for (auto c : matrix_.at(expected)) a += c;
    return a;
  }

  std::size_t items_for(std::size_t expected) const { return answered_for(expected) + no_answer_.at(expected); }

  std::optional<double> answer_rate() const {
    if (total_ == 0) return std::nullopt;
    return static_cast<double>(answers()) / static_cast<double>(total_);
  }

  /// Accuracy over answered items only.
  std::optional<double> answered_accuracy() const {
    auto a = answers();
    if (a == 0) return std::nullopt;
    return static_cast<double>(correct()) / static_cast<double>(a);
  }

  /// Recall of one expected class over its answered items.
  std::optional<double> recall(std::size_t expected) const {
    auto a = answered_for(expected);
    if (a == 0) return std::nullopt;
    return static_cast<double>(matrix_[expected][expected]) / static_cast<double>(a);
  }

  /// Mean over present classes of correct / all items of that class
  /// (abstentions count as misses).
  std::optional<double> balanced_accuracy() const {
    double sum = 0.0;
    std::size_t present = 0;
    for (std::size_t k = 0; k < names_.size(); ++k) {
      auto n = items_for(k);
      if (n == 0) continue;
      sum += static_cast<double>(matrix_[k][k]) / static_cast<double>(n);
      ++present;
    }
    if (present == 0) return std::nullopt;
    return sum / static_cast<double>(present);
  }

  /// matrix + no-answer counts must add up to the number of items.
  bool consistent() const {
    std::size_t s = 0;
    for (auto c : no_answer_) s += c;
    return s + answers() == total_;
  }

  std::optional<std::size_t> class_index(std::string_view name) const {
    for (std::size_t k = 0; k < names_.size(); ++k)
      if (names_[k] == name) return k;
    return std::nullopt;
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<std::size_t>> matrix_;
  std::vector<std::size_t> no_answer_;
  std::size_t total_ = 0;
};

// ---------------------------------------------------------------------------
// Decision lists (spot output and replay input)

struct DecisionRow {
  std::size_t index = 0;
  std::optional<std::size_t> answer;
  std::vector<double> scaled;
};

/// `index<TAB>decision<TAB>scaled...`, abstentions as '-'.
inline void write_decisions(std::ostream& out, std::span<const DecisionRow> rows,
                            const std::vector<std::string>& class_names) {
  out << "# index\tdecision";
  for (const auto& c : class_names) out << "\tscaled_" << c;
  out << '\n';
  for (const auto& r : rows) {
    out << r.index << '\t' << (r.answer ? class_names.at(*r.answer) : std::string("-"));
    for (double s : r.scaled) out << '\t' << tsv::fixed(s, 6);
    out << '\n';
  }
}

/// Reads `index<TAB>expected<TAB>decision` lines into a report.
inline ConfusionReport replay_decisions(std::istream& in, const std::vector<std::string>& class_names,
                                        const std::string& source = "decisions") {
  ConfusionReport report(class_names);
  auto lookup = [&](const tsv::Row& row, const std::string& name) -> std::size_t {
    if (auto k = report.class_index(name)) return *k;
    throw FormatError(source, row.line, "unknown class '" + name + "'");
  };
  for (const auto& row : tsv::read_rows(in)) {
    tsv::expect_fields(row, 3, source);
    auto expected = lookup(row, row.fields[1]);
    std::optional<std::size_t> answer;
    if (row.fields[2] != "-") answer = lookup(row, row.fields[2]);
    report.add(expected, answer);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Experiments

struct ExperimentConfig {
  Task task = Task::Mark;
  InputSpec input;
  TrainConfig train;
  double test_fraction = 0.25;
  bool test_first = true;
  unsigned vote_threshold = 3;
  CompositeRule composite_rule = CompositeRule::FirstPart;

  /// Vowel duration, F0 mean, pseudo-syllable duration on 7 nuclei.
  static ExperimentConfig mark_defaults() { return {}; }

  /// Vowel duration on 5 nuclei.
  static ExperimentConfig frontier_defaults() {
    ExperimentConfig c;
    c.task = Task::Frontier;
    c.input.window = 5;
    c.input.features = duration_features();
    return c;
  }

  static ExperimentConfig accent_defaults() {
    ExperimentConfig c = frontier_defaults();
    c.task = Task::Accent;
    return c;
  }
};

/// Everything needed to train on and score one corpus under one config.
struct PreparedData {
  Split split;
  NormStats norm;
  std::vector<FeatureWindow> windows;
  std::vector<int> labels;
  std::vector<std::string> class_names;
};

inline void check_labels_not_degenerate(std::span<const int> labels) {
  for (int y : labels)
    if (y != labels.front()) return;
  throw DataError("degenerate labels: single class");
}

inline PreparedData prepare(const Corpus& corpus, const ExperimentConfig& config) {
  check_window_width(static_cast<long long>(config.input.window));
  PreparedData d;
  d.class_names = class_names(config.task);
  d.labels = task_labels(corpus, config.task, config.vote_threshold, ClassMap::standard(config.composite_rule));
  if (config.task != Task::Mark) check_labels_not_degenerate(d.labels);
  d.split = chronological_split(corpus, config.test_fraction, config.test_first);
  auto matrix = select_features(compute_features(corpus, {config.input.semitones}), config.input.features);
  d.norm = fit_norm_stats(matrix, d.split.train.begin, d.split.train.end);
  if (d.norm.kept_count() == 0) throw DataError("every selected feature is constant on the training split");
  d.windows = build_windows(matrix, config.input.window, d.norm);
  return d;
}

inline Dataset make_dataset(const PreparedData& d, IndexRange range) {
  Dataset ds;
  ds.num_classes = d.class_names.size();
  for (auto i = range.begin; i < range.end; ++i) {
    ds.inputs.push_back(d.windows[i].values);
    ds.labels.push_back(d.labels[i]);
  }
  return ds;
}

inline MlpModel train_on(const PreparedData& d, const ExperimentConfig& config) {
  auto result = train(make_dataset(d, d.split.train), config.train, d.class_names);
  MlpModel m;
  m.params = std::move(result.params);
  m.priors = std::move(result.priors);
  m.norm = d.norm;
  m.input = config.input;
  m.task = config.task;
  m.class_names = d.class_names;
  m.vote_threshold = config.vote_threshold;
  m.seed = config.train.seed;
  m.train_log = std::move(result.log);
  m.best_epoch = result.best_epoch;
  return m;
}

/// Trains on the training split of the corpus.
inline MlpModel train_model(const Corpus& corpus, const ExperimentConfig& config) {
  return train_on(prepare(corpus, config), config);
}

/// Windows for applying a stored model to a corpus, using the model's own
/// normalization statistics.
inline std::vector<FeatureWindow> model_windows(const MlpModel& model, const Corpus& corpus) {
  auto matrix = select_features(compute_features(corpus, {model.input.semitones}), model.input.features);
  auto windows = build_windows(matrix, model.input.window, model.norm);
  if (!windows.empty() && windows.front().values.size() != model.params.input)
    throw DataError("model expects " + std::to_string(model.params.input) + " inputs, corpus windows have " +
                    std::to_string(windows.front().values.size()));
  return windows;
}

inline std::vector<DecisionRow> spot(const MlpModel& model, const Corpus& corpus) {
  auto windows = model_windows(model, corpus);
  std::vector<DecisionRow> rows;
  rows.reserve(windows.size());
  for (const auto& w : windows) {
    auto d = decide(model, w);
    rows.push_back({w.center, d.answer, d.scaled});
  }
  return rows;
}

inline ConfusionReport tabulate(const MlpModel& model, std::span<const FeatureWindow> windows,
                                std::span<const int> labels, IndexRange range) {
  ConfusionReport report(model.class_names);
  for (auto i = range.begin; i < range.end; ++i)
    report.add(static_cast<std::size_t>(labels[i]), decide(model, windows[i]).answer);
  return report;
}

/// Scores a stored model on the test split of a corpus.
inline ConfusionReport evaluate(const MlpModel& model, const Corpus& corpus, Task task, double test_fraction,
                                bool test_first = true, CompositeRule rule = CompositeRule::FirstPart) {
  if (task != model.task || class_names(task).size() != model.output_size())
    throw DataError("model has " + std::to_string(model.output_size()) + " outputs (" +
                    std::string(to_string(model.task)) + " task), cannot evaluate the " +
                    std::string(to_string(task)) + " task");
  auto labels = task_labels(corpus, task, model.vote_threshold, ClassMap::standard(rule));
  auto windows = model_windows(model, corpus);
  auto split = chronological_split(corpus, test_fraction, test_first);
  return tabulate(model, windows, labels, split.test);
}

struct TaskResult {
  MlpModel model;
  ConfusionReport report;
};

inline TaskResult run_task(const Corpus& corpus, const ExperimentConfig& config) {
  auto d = prepare(corpus, config);
  auto model = train_on(d, config);
  auto report = tabulate(model, d.windows, d.labels, d.split.test);
  return {std::move(model), std::move(report)};
}

/// 5-class expert mark spotting.
inline TaskResult run_mark_task(const Corpus& corpus, ExperimentConfig config = ExperimentConfig::mark_defaults()) {
  config.task = Task::Mark;
  return run_task(corpus, config);
}

/// Binary frontier spotting from listener votes.
inline TaskResult run_frontier_task(const Corpus& corpus,
                                    ExperimentConfig config = ExperimentConfig::frontier_defaults()) {
  config.task = Task::Frontier;
  return run_task(corpus, config);
}

struct AccentProbeConfig {
  ExperimentConfig base = ExperimentConfig::accent_defaults();
  std::vector<std::size_t> widths = {1, 3, 5, 7};
  std::vector<FeatureSelection> feature_sets = {
      {Feature::VowelDuration},
      {Feature::VowelDuration, Feature::PseudoSyllableDuration},
      {Feature::VowelDuration, Feature::PseudoSyllableDuration, Feature::F0Mean, Feature::F0Slope},
  };
  double inconsistency_threshold = 0.65;
};

struct AccentProbeTrial {
  std::size_t width = 0;
  FeatureSelection features;
  double balanced_accuracy = 0.0;
};

struct AccentProbeResult {
  ConfusionReport best_report;
  AccentProbeTrial best;
  std::vector<AccentProbeTrial> trials;
  /// Set when no window width or feature set reaches the threshold.
  bool inconsistent = false;
};

/// Tries every window width x feature set on the accent labels and keeps
/// the best balanced accuracy.
inline AccentProbeResult run_accent_probe(const Corpus& corpus, const AccentProbeConfig& probe = {}) {
  if (probe.widths.empty() || probe.feature_sets.empty()) throw ConfigError("accent probe needs widths and feature sets");
  AccentProbeResult result;
  bool first = true;
  for (auto width : probe.widths) {
    for (const auto& features : probe.feature_sets) {
      ExperimentConfig config = probe.base;
      config.task = Task::Accent;
      config.input.window = width;
      config.input.features = features;
      auto run = run_task(corpus, config);
      AccentProbeTrial trial{width, features, run.report.balanced_accuracy().value_or(0.0)};
      result.trials.push_back(trial);
      if (first || trial.balanced_accuracy > result.best.balanced_accuracy) {
        result.best = trial;
        result.best_report = std::move(run.report);
        first = false;
      }
    }
  }
  result.inconsistent = result.best.balanced_accuracy < probe.inconsistency_threshold;
  return result;
}

// ---------------------------------------------------------------------------
// Accent / expert-mark alignment

enum class AlignmentMark { P = 0, RGroupEdge = 1, R = 2, Other = 3 };
enum class SyllablePosition { Monosyllable = 0, First = 1, Last = 2 };

inline constexpr std::string_view kAlignmentMarkNames[] = {"P", "R-", "R", "other"};
inline constexpr std::string_view kSyllablePositionNames[] = {"monosyllable", "first", "last"};

struct AlignmentTable {
  /// [mark class][position] counts over accent-perceived, expert-marked nuclei.
  std::size_t cells[4][3] = {};
  std::size_t accented = 0;         ///< nuclei perceived as accented
  std::size_t accented_marked = 0;  ///< of those, carrying any expert mark
  std::size_t medial = 0;           ///< accented, marked, word-medial (not tabulated)

  std::size_t tabulated() const {
    std::size_t s = 0;
    for (const auto& row : cells)
      for (auto c : row) s += c;
    return s;
  }

  /// Share of perceived accents carrying an expert mark.
  std::optional<double> coverage() const {
    if (accented == 0) return std::nullopt;
    return static_cast<double>(accented_marked) / static_cast<double>(accented);
  }
};

inline AlignmentMark alignment_mark(const ProsodicMark& mark) {
  const auto& p = mark.parts.front();
  if (p.base == BaseSymbol::P) return AlignmentMark::P;
  if (p.base == BaseSymbol::R)
    return p.index && std::holds_alternative<GroupEdge>(*p.index) ? AlignmentMark::RGroupEdge : AlignmentMark::R;
  return AlignmentMark::Other;
}

/// Cross-tabulates expert marks against word position for nuclei with at
/// least `threshold` accent votes. Word ranges must partition the nuclei.
inline AlignmentTable accent_alignment_report(const Corpus& corpus, std::span<const IndexRange> words,
                                              unsigned threshold = 3) {
  check_vote_threshold(threshold, corpus.n_listeners);
  std::size_t expect = 0;
  for (const auto& w : words) {
    if (w.begin != expect || w.end <= w.begin) throw DataError("word ranges do not partition the nuclei");
    expect = w.end;
  }
  if (expect != corpus.nuclei.size()) throw DataError("word ranges do not partition the nuclei");

  AlignmentTable t;
  for (const auto& w : words) {
    for (auto i = w.begin; i < w.end; ++i) {
      const auto& n = corpus.nuclei[i];
      if (n.accent_votes < threshold) continue;
      ++t.accented;
      if (n.expert_marks.empty()) continue;
      ++t.accented_marked;
      std::optional<SyllablePosition> pos;
      if (w.size() == 1)
        pos = SyllablePosition::Monosyllable;
      else if (i == w.begin)
        pos = SyllablePosition::First;
      else if (i + 1 == w.end)
        pos = SyllablePosition::Last;
      if (!pos) {
        ++t.medial;
        continue;
      }
      ++t.cells[static_cast<int>(alignment_mark(n.expert_marks.front()))][static_cast<int>(*pos)];
    }
  }
  return t;
}

}  // namespace prosody

#endif  // PROSODY_EVAL_HPP
