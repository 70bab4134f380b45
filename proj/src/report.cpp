#include "fairness/report.hpp"

#include <cstdlib>
#include <sstream>

#include "fairness/errors.hpp"
#include "fairness/format.hpp"

namespace fairness {

namespace {

const char* comparison_name(Comparison c) { return c == Comparison::kAtMost ? "at-most" : "above"; }

void add_pairs(Document& doc, const std::string& prefix, const std::vector<PairGaps>& pairs,
               const char* a_name, const char* b_name) {
  for (const auto& p : pairs) {
    const std::string key = prefix + "." + p.first + "_vs_" + p.second;
    doc.set(key + "." + a_name, p.a);
    doc.set(key + "." + b_name, p.b);
  }
}

}  // namespace

OutputFormat parse_output_format(const std::string& text) {
  if (text == "text") return OutputFormat::kText;
  if (text == "doc") return OutputFormat::kDocument;
  throw InvalidArgument("format must be text or doc, got '" + text + "'");
}

void Document::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void Document::set(const std::string& key, double value) { set(key, format_number(value)); }

void Document::set(const std::string& key, const std::optional<double>& value) {
  set(key, format_number(value));
}

void Document::set(const std::string& key, bool value) {
  set(key, std::string(value ? "true" : "false"));
}

void Document::set_count(const std::string& key, std::size_t value) {
  set(key, std::to_string(value));
}

std::optional<std::string> Document::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void Document::merge(const std::string& prefix, const Document& other) {
  for (const auto& [k, v] : other.entries_) set(prefix.empty() ? k : prefix + "." + k, v);
}

std::string Document::render(OutputFormat format) const {
  std::string out;
  const char* sep = format == OutputFormat::kDocument ? " = " : ": ";
  for (const auto& [k, v] : entries_) {
    out += k;
    out += sep;
    out += v;
    out += '\n';
  }
  return out;
}

Document Document::parse(const std::string& text) {
  Document doc;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos || eq == 0) {
      throw ParseError("document line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    doc.set(line.substr(0, eq), line.substr(eq + 3));
  }
  return doc;
}

Document to_document(const ConfusionCounts& c) {
  Document d;
  d.set("tp", c.tp);
  d.set("fp", c.fp);
  d.set("fn", c.fn);
  d.set("tn", c.tn);
  return d;
}

Document to_document(const RatePair& r) {
  Document d;
  d.set("fpr", r.fpr);
  d.set("fnr", r.fnr);
  return d;
}

Document to_document(const CalibrationReport& r) {
  Document d;
  d.set("sup_gap", r.sup_gap);
  d.set("l1_gap", r.l1_gap);
  d.set_count("defined_bins", r.defined_bins);
  d.set("sufficiency_holds", r.sufficiency_holds());
  for (std::size_t k = 0; k < r.bins.size(); ++k) {
    const auto& b = r.bins[k];
    const std::string key = "bin." + std::to_string(k);
    d.set(key + ".lower", b.lower);
    d.set(key + ".upper", b.upper);
    d.set(key + ".level", b.level);
    d.set(key + ".mass", b.mass);
    d.set(key + ".pooled_rate", b.pooled_rate);
    for (std::size_t g = 0; g < r.groups.size(); ++g) {
      d.set(key + ".rate." + r.groups[g], b.group_rate[g]);
    }
    d.set(key + ".gap", b.gap);
  }
  return d;
}

Document to_document(const CalibrationErrorReport& r) {
  Document d;
  d.set("sup_error", r.sup_error);
  d.set("l1_error", r.l1_error);
  for (std::size_t k = 0; k < r.bins.size(); ++k) {
    const auto& b = r.bins[k];
    const std::string key = "bin." + std::to_string(k);
    d.set(key + ".level", b.level);
    d.set(key + ".rate", b.rate);
    d.set(key + ".error", b.error);
    d.set(key + ".mass", b.mass);
  }
  return d;
}

Document to_document(const SeparationReport& r) {
  Document d;
  for (std::size_t g = 0; g < r.groups.size(); ++g) {
    d.merge("group." + r.groups[g], to_document(r.rates[g]));
  }
  add_pairs(d, "pair", r.pairs, "fpr_gap", "fnr_gap");
  d.set("fpr_gap", r.fpr_gap);
  d.set("fnr_gap", r.fnr_gap);
  return d;
}

Document to_document(const SufficiencyReport& r) {
  Document d;
  for (std::size_t g = 0; g < r.groups.size(); ++g) {
    d.set("group." + r.groups[g] + ".p_y1_given_r1", r.values[g].given_positive);
    d.set("group." + r.groups[g] + ".p_y1_given_r0", r.values[g].given_negative);
  }
  add_pairs(d, "pair", r.pairs, "r1_gap", "r0_gap");
  d.set("r1_gap", r.positive_gap);
  d.set("r0_gap", r.negative_gap);
  return d;
}

Document to_document(const UtilityReport& r) {
  Document d;
  for (const auto& g : r.groups) d.set("group." + g.group, g.value);
  d.set("disparity", r.disparity);
  d.set("tolerance", r.tolerance);
  d.set("verdict", r.verdict);
  for (const auto& [label, b] : r.case_breakdown) d.merge("cases." + label, to_document(b));
  return d;
}

Document to_document(const CaseBreakdown& b) {
  Document d;
  for (std::size_t i = 0; i < b.cases.size(); ++i) {
    const std::string key = "case" + std::to_string(i + 1);
    d.set(key + ".mass", b.cases[i].mass);
    d.set(key + ".loss", b.cases[i].loss);
  }
  d.set("total_loss", b.total_loss());
  return d;
}

Document to_document(const ImpossibilityWitness& w) {
  Document d;
  d.set("base_rate_gap", w.base_rate_gap);
  d.set("separation_gap", w.separation_gap);
  d.set("sufficiency_gap", w.sufficiency_gap);
  d.set("implied_sufficiency_gap", w.implied_sufficiency_gap);
  d.set("separation_holds", w.separation_holds);
  d.set("sufficiency_holds", w.sufficiency_holds);
  d.set("consistent", w.consistent);
  return d;
}

std::string PlotSeries::to_csv() const {
  std::string out = "x,y\n";
  for (const auto& [x, y] : points) out += format_number(x) + "," + format_number(y) + "\n";
  return out;
}

bool evaluate(Comparison comparison, double magnitude, double tolerance) {
  return comparison == Comparison::kAtMost ? magnitude <= tolerance : magnitude > tolerance;
}

void ExperimentReport::add_metric(const std::string& key, const std::optional<double>& value) {
  for (auto& [k, v] : metrics) {
    if (k == key) {
      v = value;
      return;
    }
  }
  metrics.emplace_back(key, value);
}

const ReportVerdict& ExperimentReport::add_verdict(const std::string& name,
                                                   const std::string& metric_key,
                                                   Comparison comparison, double tolerance) {
  ReportVerdict v{name, metric_key, comparison, tolerance,
                  evaluate(comparison, metric(metric_key), tolerance)};
  verdicts.push_back(v);
  return verdicts.back();
}

std::optional<double> ExperimentReport::metric_or_undefined(const std::string& key) const {
  for (const auto& [k, v] : metrics) {
    if (k == key) return v;
  }
  throw InvalidArgument("report '" + id + "' has no metric '" + key + "'");
}

double ExperimentReport::metric(const std::string& key) const {
  const auto v = metric_or_undefined(key);
  if (!v) throw InvalidArgument("metric '" + key + "' is undefined");
  return *v;
}

const ReportVerdict& ExperimentReport::verdict(const std::string& name) const {
  for (const auto& v : verdicts) {
    if (v.name == name) return v;
  }
  throw InvalidArgument("report '" + id + "' has no verdict '" + name + "'");
}

Document ExperimentReport::to_document() const {
  Document d;
  d.set("experiment", id);
  d.merge("parameter", parameters);
  for (const auto& [k, v] : metrics) d.set("metric." + k, v);
  for (const auto& v : verdicts) {
    const std::string key = "verdict." + v.name;
    d.set(key + ".holds", v.holds);
    d.set(key + ".metric", v.metric);
    d.set(key + ".comparison", comparison_name(v.comparison));
    d.set(key + ".tolerance", v.tolerance);
  }
  for (const auto& s : series) d.set_count("series." + s.name + ".points", s.points.size());
  for (std::size_t i = 0; i < notes.size(); ++i) d.set("note." + std::to_string(i), notes[i]);
  return d;
}

std::vector<std::string> inconsistent_verdicts(const Document& rendered) {
  std::vector<std::string> bad;
  const std::string prefix = "verdict.";
  const std::string suffix = ".holds";
  for (const auto& [key, value] : rendered.entries()) {
    if (key.rfind(prefix, 0) != 0 || key.size() <= prefix.size() + suffix.size() ||
        key.compare(key.size() - suffix.size(), suffix.size(), suffix) != 0) {
      continue;
    }
    const std::string name = key.substr(prefix.size(), key.size() - prefix.size() - suffix.size());
    const auto metric_key = rendered.get(prefix + name + ".metric");
    const auto comparison = rendered.get(prefix + name + ".comparison");
    const auto tolerance = rendered.get(prefix + name + ".tolerance");
    const auto magnitude = metric_key ? rendered.get("metric." + *metric_key) : std::nullopt;
    if (!magnitude || !comparison || !tolerance || *magnitude == "undefined") {
      bad.push_back(name);
      continue;
    }
    const double m = std::strtod(magnitude->c_str(), nullptr);
    const double t = std::strtod(tolerance->c_str(), nullptr);
    const bool holds =
        *comparison == "at-most" ? m <= t : (*comparison == "above" ? m > t : !(value == "true"));
    if (holds != (value == "true")) bad.push_back(name);
  }
  return bad;
}

}  // namespace fairness
