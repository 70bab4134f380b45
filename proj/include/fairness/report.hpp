#pragma once

// Line-oriented report documents.
//
// The structured form is one `key = value` line per entry with dotted key
// paths; the text form prints `key: value`. Numbers are rendered with 12
// significant digits so identical inputs give byte-identical files.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairness/decision_rules.hpp"
#include "fairness/fairness_metrics.hpp"
#include "fairness/utility_analysis.hpp"

namespace fairness {

enum class OutputFormat { kText, kDocument };

OutputFormat parse_output_format(const std::string& text);

class Document {
 public:
  // Inserts or replaces; keeps first-insertion order.
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void set(const std::string& key, double value);
  void set(const std::string& key, const std::optional<double>& value);
  void set(const std::string& key, bool value);
  void set_count(const std::string& key, std::size_t value);

  std::optional<std::string> get(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  void merge(const std::string& prefix, const Document& other);

  std::string render(OutputFormat format) const;

  // Inverse of render(kDocument). Throws ParseError on malformed lines.
  static Document parse(const std::string& text);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

Document to_document(const ConfusionCounts& c);
Document to_document(const RatePair& r);
Document to_document(const CalibrationReport& r);
Document to_document(const CalibrationErrorReport& r);
Document to_document(const SeparationReport& r);
Document to_document(const SufficiencyReport& r);
Document to_document(const UtilityReport& r);
Document to_document(const CaseBreakdown& b);
Document to_document(const ImpossibilityWitness& w);

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;

  // `x,y` header then one row per point.
  std::string to_csv() const;
};

enum class Comparison {
  kAtMost,  // holds iff magnitude <= tolerance
  kAbove,   // holds iff magnitude > tolerance
};

struct ReportVerdict {
  std::string name;
  // Key of the metric the verdict is derived from.
  std::string metric;
  Comparison comparison = Comparison::kAtMost;
  double tolerance = 0.0;
  bool holds = false;
};

bool evaluate(Comparison comparison, double magnitude, double tolerance);

struct ExperimentReport {
  std::string id;
  Document parameters;
  std::vector<std::pair<std::string, std::optional<double>>> metrics;
  std::vector<ReportVerdict> verdicts;
  std::vector<PlotSeries> series;
  std::vector<std::string> notes;

  void add_metric(const std::string& key, const std::optional<double>& value);
  // Adds the verdict and evaluates it against the metric already recorded.
  const ReportVerdict& add_verdict(const std::string& name, const std::string& metric,
                                   Comparison comparison, double tolerance);

  // Throws InvalidArgument if absent or undefined.
  double metric(const std::string& key) const;
  std::optional<double> metric_or_undefined(const std::string& key) const;
  const ReportVerdict& verdict(const std::string& name) const;

  Document to_document() const;
};

// Re-derives every verdict of a rendered report from its metric lines and
// returns the names of verdicts whose recorded outcome disagrees.
std::vector<std::string> inconsistent_verdicts(const Document& rendered_report);

}  // namespace fairness
