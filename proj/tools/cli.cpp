#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>

#include "fairness/audit_dataset.hpp"
#include "fairness/case_studies.hpp"
#include "fairness/errors.hpp"
#include "fairness/fairness_metrics.hpp"
#include "fairness/format.hpp"
#include "fairness/report.hpp"
#include "fairness/sampling.hpp"

namespace fairness::cli {

namespace {

struct Options {
  std::string input;
  std::size_t bins = kDefaultBins;
  std::optional<std::size_t> grid;
  std::size_t samples = kDefaultSamples;
  std::uint64_t seed = kDefaultSeed;
  std::string convention;
  std::string out_dir;
  std::string format = "text";
  double tolerance = kSeparationTol;
  double threshold = 0.5;
  std::size_t emit_sample = 0;
  std::string experiment;
  std::vector<std::string> overrides;
};

struct Param {
  std::string key;
  std::string fallback;
  bool numeric = true;
};

const std::map<std::string, std::vector<Param>>& schemas() {
  static const std::map<std::string, std::vector<Param>> s = {
      {"recommender", {{"men_map", "shift:0.2", false}}},
      {"equal-rates", {{"p_men", "0.1"}, {"p_women", "0.4"}, {"fp_mass", "0.1"}}},
      {"judge", {{"base_rate_m", "0.3"}, {"base_rate_f", "0.6"}, {"reference_t", "0.5"}}},
      {"appendix", {{"reshapes", "100"}}},
      {"impossibility", {{"populations", "500"}}},
  };
  return s;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

class Overrides {
 public:
  Overrides(const std::string& id, const std::vector<std::string>& args) {
    const auto it = schemas().find(id);
    if (it == schemas().end()) {
      throw InvalidArgument("unknown experiment '" + id + "'; valid ids: " +
                            join(experiment_ids()));
    }
    for (const auto& p : it->second) values_[p.key] = p.fallback;
    for (const auto& arg : args) {
      const auto eq = arg.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw InvalidArgument("override '" + arg + "' is not key=value");
      }
      const std::string key = arg.substr(0, eq);
      const auto param = std::find_if(it->second.begin(), it->second.end(),
                                      [&](const Param& p) { return p.key == key; });
      if (param == it->second.end()) {
        std::vector<std::string> keys;
        for (const auto& p : it->second) keys.push_back(p.key);
        throw InvalidArgument("experiment '" + id + "' has no parameter '" + key +
                              "'; valid parameters: " + join(keys));
      }
      const std::string value = arg.substr(eq + 1);
      if (param->numeric) to_number(key, value);
      values_[key] = value;
    }
  }

  double number(const std::string& key) const { return to_number(key, values_.at(key)); }

  std::size_t count(const std::string& key) const {
    const double v = number(key);
    if (!(v >= 0.0) || v != std::floor(v)) {
      throw InvalidArgument("parameter '" + key + "' must be a non-negative integer");
    }
    return static_cast<std::size_t>(v);
  }

  const std::string& text(const std::string& key) const { return values_.at(key); }

 private:
  static double to_number(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0' || !std::isfinite(v)) {
      throw InvalidArgument("parameter '" + key + "' expects a number, got '" + value + "'");
    }
    return v;
  }

  std::map<std::string, std::string> values_;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  f << content;
  if (!f) throw Error("cannot write " + path.string());
}

void emit(const ExperimentReport& report, const Options& opt, std::ostream& out) {
  const auto format = parse_output_format(opt.format);
  const std::string rendered = report.to_document().render(format);
  out << rendered;
  if (opt.out_dir.empty()) return;
  const std::filesystem::path dir(opt.out_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / (format == OutputFormat::kDocument ? "report.doc" : "report.txt"), rendered);
  for (const auto& s : report.series) write_file(dir / (s.name + ".csv"), s.to_csv());
}

ExperimentReport audit(const Options& opt) {
  if (opt.input.empty()) throw InvalidArgument("audit needs --input FILE");
  if (opt.bins == 0) throw InvalidArgument("--bins must be positive");
  const auto data = AuditDataset::load_csv(opt.input);
  if (data.labels().size() < 2) {
    throw InvalidArgument("audit needs at least two groups, found " +
                          std::to_string(data.labels().size()));
  }

  ExperimentReport report;
  report.id = "audit";
  report.parameters.set("input", opt.input);
  report.parameters.set_count("bins", opt.bins);
  report.parameters.set("tolerance", opt.tolerance);
  report.add_metric("records", static_cast<double>(data.size()));

  const bool recorded = data.has_decisions();
  const auto rule = DecisionRule::shared_threshold(data.labels(), opt.threshold);
  report.parameters.set("decisions", recorded ? "recorded" : "score > threshold");
  if (!recorded) report.parameters.set("threshold", opt.threshold);

  std::vector<ConfusionCounts> counts;
  for (const auto& g : data.labels()) {
    const auto c = recorded ? confusion(data, g) : confusion(data, rule, g);
    counts.push_back(c);
    const auto r = rates(c);
    report.add_metric("group." + g + ".count", c.total());
    report.add_metric("group." + g + ".base_rate",
                      c.total() > 0 ? std::optional<double>((c.tp + c.fn) / c.total())
                                    : std::nullopt);
    report.add_metric("group." + g + ".tp", c.tp);
    report.add_metric("group." + g + ".fp", c.fp);
    report.add_metric("group." + g + ".fn", c.fn);
    report.add_metric("group." + g + ".tn", c.tn);
    report.add_metric("group." + g + ".fpr", r.fpr);
    report.add_metric("group." + g + ".fnr", r.fnr);
    report.add_metric("group." + g + ".within_calibration_sup_error",
                      within_group_calibration_error(data, g, opt.bins).sup_error);
  }

  const auto sep = separation_gap(data.labels(), counts);
  report.add_metric("separation.fpr_gap", sep.fpr_gap);
  report.add_metric("separation.fnr_gap", sep.fnr_gap);
  report.add_metric("separation.max_gap", sep.max_gap());
  const auto suff = sufficiency_gap_binary(data.labels(), counts);
  report.add_metric("sufficiency.r1_gap", suff.positive_gap);
  report.add_metric("sufficiency.r0_gap", suff.negative_gap);
  report.add_metric("sufficiency.max_gap", suff.max_gap());
  const auto cal = between_group_calibration_gap(data, opt.bins);
  report.add_metric("calibration.between.sup_gap", cal.sup_gap);
  report.add_metric("calibration.between.l1_gap", cal.l1_gap);
  report.add_metric("calibration.between.defined_bins", static_cast<double>(cal.defined_bins));

  if (sep.max_gap()) {
    report.add_verdict("separation", "separation.max_gap", Comparison::kAtMost, opt.tolerance);
  }
  if (suff.max_gap()) {
    report.add_verdict("sufficiency", "sufficiency.max_gap", Comparison::kAtMost, opt.tolerance);
  }
  report.add_verdict("between_group_calibration", "calibration.between.sup_gap",
                     Comparison::kAtMost, opt.tolerance);

  for (std::size_t g = 0; g < cal.groups.size(); ++g) {
    PlotSeries s{"calibration_" + cal.groups[g], {}};
    for (const auto& b : cal.bins) {
      if (b.level && b.group_rate[g]) s.points.emplace_back(*b.level, *b.group_rate[g]);
    }
    report.series.push_back(std::move(s));
  }
  return report;
}

ExperimentReport simulate(const Options& opt) {
  const Overrides params(opt.experiment, opt.overrides);
  const std::string& id = opt.experiment;
  const std::size_t grid = opt.grid.value_or(id == "impossibility" ? 256 : kDefaultGridSize);
  if (grid == 0) throw InvalidArgument("--grid must be positive");

  if (id == "recommender") {
    const std::string spec = params.text("men_map");
    auto report =
        run_recommender_experiment(parse_score_map(spec, grid), grid, opt.samples, opt.seed);
    report.parameters.set("men_map", spec);
    return report;
  }
  if (id == "equal-rates") {
    return run_equal_rates_unequal_utility(params.number("p_men"), params.number("p_women"),
                                           params.number("fp_mass"));
  }
  if (id == "judge") {
    if (opt.convention.empty()) {
      throw InvalidArgument("judge needs --convention per-outcome or per-person");
    }
    const double brm = params.number("base_rate_m");
    const double brf = params.number("base_rate_f");
    const double ref = params.number("reference_t");
    auto report = run_judge_experiment(brm, brf, ref, parse_convention(opt.convention), grid);
    if (opt.emit_sample > 0) {
      if (opt.out_dir.empty()) throw InvalidArgument("--emit-sample needs --out DIR");
      const auto pop = judge_population(brm, brf, grid);
      const auto data = sample(pop, opt.emit_sample, opt.seed, judge_rule(pop, ref));
      std::filesystem::create_directories(opt.out_dir);
      data.save_csv((std::filesystem::path(opt.out_dir) / "sample.csv").string());
      report.parameters.set_count("emitted_sample", opt.emit_sample);
    }
    return report;
  }
  if (id == "appendix") return run_appendix_counterexample(grid, params.count("reshapes"), opt.seed);
  return run_impossibility_sweep(params.count("populations"), grid, opt.seed);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Group fairness criteria, decision rules and expected-utility analyses", "fairscope"};
  app.require_subcommand(1);
  app.add_option("--input", opt.input, "Audit CSV (group,score,outcome,decision)");
  app.add_option("--bins", opt.bins, "Calibration bins")->capture_default_str();
  app.add_option("--grid", opt.grid, "Score grid size (default 1024; 256 for impossibility)");
  app.add_option("--samples", opt.samples, "Monte Carlo samples")->capture_default_str();
  app.add_option("--seed", opt.seed, "Random seed")->capture_default_str();
  app.add_option("--convention", opt.convention, "Judge harm convention")
      ->check(CLI::IsMember({"per-outcome", "per-person"}));
  app.add_option("--out", opt.out_dir, "Directory for the report and plot CSVs");
  app.add_option("--format", opt.format, "Report format")
      ->check(CLI::IsMember({"text", "doc"}))
      ->capture_default_str();
  app.add_option("--tol", opt.tolerance, "Audit verdict tolerance")->capture_default_str();
  app.add_option("--threshold", opt.threshold,
                 "Audit decision threshold when the file has no decisions")
      ->capture_default_str();
  app.add_option("--emit-sample", opt.emit_sample,
                 "judge: also write N sampled records to sample.csv in --out");

  auto* audit_cmd = app.add_subcommand("audit", "Audit a CSV dataset")->fallthrough();
  auto* simulate_cmd = app.add_subcommand("simulate", "Run a named experiment")->fallthrough();
  simulate_cmd->add_option("id", opt.experiment, "Experiment id")->required();
  simulate_cmd->add_option("overrides", opt.overrides, "Parameter overrides key=value");
  auto* list_cmd = app.add_subcommand("list", "List experiments and their parameters");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (list_cmd->parsed()) {
      for (const auto& id : experiment_ids()) {
        out << id;
        for (const auto& p : schemas().at(id)) out << ' ' << p.key << '=' << p.fallback;
        out << '\n';
      }
      return 0;
    }
    if (audit_cmd->parsed()) {
      emit(audit(opt), opt, out);
      return 0;
    }
    emit(simulate(opt), opt, out);
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace fairness::cli
