#ifndef PROSODY_REPORT_HPP
#define PROSODY_REPORT_HPP

#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "prosody/error.hpp"
#include "prosody/eval.hpp"
#include "prosody/tsv.hpp"

namespace prosody {

inline constexpr std::string_view kReportSchema = "prosody.confusion_report";
inline constexpr int kReportSchemaVersion = 1;

enum class ReportFormat { Text, Json };

inline ReportFormat report_format_from_string(std::string_view s) {
  if (s == "text" || s == "txt") return ReportFormat::Text;
  if (s == "json") return ReportFormat::Json;
  throw ConfigError("unknown report format '" + std::string(s) + "' (expected text or json)");
}

namespace detail {

inline std::string rate(std::optional<double> v) { return v ? tsv::fixed(*v, 4) : std::string("n/a"); }

inline nlohmann::json rate_json(std::optional<double> v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace detail

/// Fixed-layout table: one row per expected class, one column per answered
/// class, then the abstentions.
inline std::string report_text(const ConfusionReport& r) {
  std::ostringstream out;
  const auto& names = r.class_names();
  constexpr int w = 8;
  out << "confusion matrix (rows: expected, columns: answered)\n";
  out << std::setw(w) << "";
  for (const auto& n : names) out << std::setw(w) << n;
  out << std::setw(w + 2) << "no-ans" << '\n';
  for (std::size_t k = 0; k < names.size(); ++k) {
    out << std::setw(w) << names[k];
    for (std::size_t j = 0; j < names.size(); ++j) out << std::setw(w) << r.cell(k, j);
    out << std::setw(w + 2) << r.no_answer()[k] << '\n';
  }
  out << '\n';
  out << "answers: " << r.answers() << " / " << r.total() << '\n';
  out << "answer rate: " << detail::rate(r.answer_rate()) << '\n';
  out << "answered accuracy: " << detail::rate(r.answered_accuracy());
  if (r.answers() > 0) out << " (" << r.correct() << "/" << r.answers() << ")";
  out << '\n';
  out << "balanced accuracy: " << detail::rate(r.balanced_accuracy()) << '\n';
  out << "recall over answered:\n";
  for (std::size_t k = 0; k < names.size(); ++k) {
    out << "  " << std::left << std::setw(6) << names[k] << std::right << detail::rate(r.recall(k));
    if (r.answered_for(k) > 0) out << " (" << r.cell(k, k) << "/" << r.answered_for(k) << ")";
    out << '\n';
  }
  return out.str();
}

inline nlohmann::json report_json(const ConfusionReport& r, const nlohmann::json& config = nlohmann::json::object()) {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["version"] = kReportSchemaVersion;
  j["classes"] = r.class_names();
  j["matrix"] = r.matrix();
  j["no_answer"] = r.no_answer();
  j["totals"] = {{"answers", r.answers()}, {"items", r.total()}, {"correct", r.correct()}};
  j["answer_rate"] = detail::rate_json(r.answer_rate());
  j["answered_accuracy"] = detail::rate_json(r.answered_accuracy());
  j["balanced_accuracy"] = detail::rate_json(r.balanced_accuracy());
  nlohmann::json recall = nlohmann::json::object();
  for (std::size_t k = 0; k < r.num_classes(); ++k) recall[r.class_names()[k]] = detail::rate_json(r.recall(k));
  j["recall"] = recall;
  j["config"] = config;
  return j;
}

inline std::string report(const ConfusionReport& r, ReportFormat format,
                          const nlohmann::json& config = nlohmann::json::object()) {
  if (format == ReportFormat::Json) return report_json(r, config).dump(2) + "\n";
  return report_text(r);
}

inline std::string alignment_text(const AlignmentTable& t) {
  std::ostringstream out;
  constexpr int w = 14;
  out << std::setw(8) << "";
  for (auto p : kSyllablePositionNames) out << std::setw(w) << p;
  out << '\n';
  for (int m = 0; m < 4; ++m) {
    out << std::setw(8) << kAlignmentMarkNames[m];
    for (int p = 0; p < 3; ++p) out << std::setw(w) << t.cells[m][p];
    out << '\n';
  }
  out << "accented nuclei: " << t.accented << '\n';
  out << "expert-marked: " << t.accented_marked << " (medial, untabulated: " << t.medial << ")\n";
  out << "coverage: " << detail::rate(t.coverage()) << '\n';
  return out.str();
}

}  // namespace prosody

#endif  // PROSODY_REPORT_HPP
