#ifndef PROSODY_LABELS_HPP
#define PROSODY_LABELS_HPP

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prosody/coding.hpp"
#include "prosody/corpus.hpp"
#include "prosody/error.hpp"

namespace prosody {

using ClassCounts = std::array<std::size_t, kNumGenericClasses>;

inline ClassCounts class_counts(std::span<const VocalicNucleus> nuclei, const ClassMap& mapping = ClassMap::standard()) {
  ClassCounts counts{};
  for (const auto& n : nuclei) ++counts[static_cast<std::size_t>(to_generic_class(n.expert_marks, mapping))];
  return counts;
}

inline ClassCounts class_counts(const Corpus& corpus, const ClassMap& mapping = ClassMap::standard()) {
  return class_counts(std::span<const VocalicNucleus>(corpus.nuclei), mapping);
}

/// Relative frequencies. Throws if a class never occurs, naming it.
inline std::vector<double> priors_from_counts(std::span<const std::size_t> counts,
                                              std::span<const std::string> class_names) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  std::vector<double> priors(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) {
      std::string name = k < class_names.size() ? class_names[k] : std::to_string(k);
      throw DataError("class '" + name + "' is absent from the training data");
    }
    priors[k] = static_cast<double>(counts[k]) / static_cast<double>(total);
  }
  return priors;
}

enum class Task { Mark, Frontier, Accent };

inline std::string_view to_string(Task t) {
  switch (t) {
    case Task::Mark: return "mark";
    case Task::Frontier: return "frontier";
    case Task::Accent: return "accent";
  }
  return "?";
}

inline Task task_from_string(std::string_view s) {
  if (s == "mark") return Task::Mark;
  if (s == "frontier") return Task::Frontier;
  if (s == "accent") return Task::Accent;
  throw ConfigError("unknown task '" + std::string(s) + "' (expected mark, frontier or accent)");
}

/// Output class names for a task; index = network output.
inline std::vector<std::string> class_names(Task t) {
  switch (t) {
    case Task::Mark: {
      std::vector<std::string> names;
      for (auto c : kAllGenericClasses) names.emplace_back(to_string(c));
      return names;
    }
    case Task::Frontier: return {"N", "F"};
    case Task::Accent: return {"N", "A"};
  }
  return {};
}

/// Per-nucleus class index for the 5-class mark task.
inline std::vector<int> mark_labels(const Corpus& corpus, const ClassMap& mapping = ClassMap::standard()) {
  std::vector<int> labels;
  labels.reserve(corpus.nuclei.size());
  for (const auto& n : corpus.nuclei) labels.push_back(static_cast<int>(to_generic_class(n.expert_marks, mapping)));
  return labels;
}

inline void check_vote_threshold(unsigned threshold, unsigned n_listeners) {
  if (threshold < 1) throw ConfigError("vote threshold must be at least 1");
  if (threshold > n_listeners)
    throw ConfigError("vote threshold " + std::to_string(threshold) + " exceeds n_listeners=" +
                      std::to_string(n_listeners));
}

/// 1 when at least `threshold` listeners marked the nucleus, else 0.
inline std::vector<int> vote_labels(const Corpus& corpus, Task task, unsigned threshold) {
  if (task == Task::Mark) throw ConfigError("vote labels need the frontier or accent task");
  check_vote_threshold(threshold, corpus.n_listeners);
  std::vector<int> labels;
  labels.reserve(corpus.nuclei.size());
  for (const auto& n : corpus.nuclei) {
    unsigned votes = task == Task::Frontier ? n.frontier_votes : n.accent_votes;
    labels.push_back(votes >= threshold ? 1 : 0);
  }
  return labels;
}

inline std::vector<int> task_labels(const Corpus& corpus, Task task, unsigned threshold,
                                    const ClassMap& mapping = ClassMap::standard()) {
  return task == Task::Mark ? mark_labels(corpus, mapping) : vote_labels(corpus, task, threshold);
}

}  // namespace prosody

#endif  // PROSODY_LABELS_HPP
