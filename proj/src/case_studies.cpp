#include "fairness/case_studies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairness/errors.hpp"
#include "fairness/fairness_metrics.hpp"
#include "fairness/format.hpp"
#include "fairness/kernels.hpp"

namespace fairness {

namespace {

constexpr double kEqualRatesTol = 1e-9;
constexpr double kCalibratedTol = 1e-9;
constexpr double kCrossingTol = 1e-3;
constexpr double kXGapMin = 0.01;
constexpr double kSufficiencyFloor = 1e-4;

double parse_double(const std::string& text, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0' || !std::isfinite(v)) {
    throw InvalidArgument("bad number '" + text + "' in " + what);
  }
  return v;
}

std::vector<std::pair<double, double>> linspace_series(std::size_t points,
                                                       double (*f)(double)) {
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(points - 1);
    out.emplace_back(x, f(x));
  }
  return out;
}

void add_cases(ExperimentReport& report, const std::string& prefix, const CaseBreakdown& b) {
  for (std::size_t i = 0; i < b.cases.size(); ++i) {
    const std::string key = prefix + ".case" + std::to_string(i + 1);
    report.add_metric(key + ".mass", b.cases[i].mass);
    report.add_metric(key + ".loss", b.cases[i].loss);
  }
  report.add_metric(prefix + ".loss_total", b.total_loss());
}

std::string one_line(const DecisionRule& rule) {
  std::string text = format_rule(rule);
  while (!text.empty() && text.back() == '\n') text.pop_back();
  std::replace(text.begin(), text.end(), '\n', ';');
  return text;
}

std::vector<std::pair<double, double>> roc_series(const ConditionalScoreDensity& d,
                                                  std::size_t points) {
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = points; i-- > 0;) {
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    const auto p = roc_point(d, Deterministic{t});
    out.emplace_back(p.fpr, p.tpr);
  }
  return out;
}

ScoreDensity normalized_triangle(std::size_t grid, double centre, double half_width) {
  auto tri = ScoreDensity::from_function(grid, [&](double s) {
    return std::max(0.0, 1.0 - std::abs(s - centre) / half_width);
  });
  const double m = tri.mass();
  if (!(m > 0.0)) throw InvalidArgument("bump narrower than one grid cell");
  return tri.scaled(1.0 / m);
}

// Piecewise-linear random shape through control points, normalized and
// calibrated.
ConditionalScoreDensity random_calibrated(std::size_t grid, std::mt19937_64& rng) {
  constexpr int kKnots = 6;
  double knots[kKnots];
  for (double& k : knots) {
    const double u = 0.05 + 1.7 * kernels::unit(rng);
    k = u * u;
  }
  auto f = ScoreDensity::from_function(grid, [&](double s) {
    const double x = s * (kKnots - 1);
    const int i = std::min(static_cast<int>(x), kKnots - 2);
    const double frac = x - i;
    return knots[i] * (1.0 - frac) + knots[i + 1] * frac;
  });
  return ConditionalScoreDensity::calibrated(f.scaled(1.0 / f.mass()));
}

}  // namespace

ScoreMap parse_score_map(const std::string& spec, std::size_t grid_size) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto needs_arg = [&]() {
    if (arg.empty()) throw InvalidArgument("score map '" + name + "' needs a parameter");
    return parse_double(arg, "score map '" + spec + "'");
  };
  if (name == "identity" && arg.empty()) return ScoreMap::identity(grid_size);
  if (name == "flip" && arg.empty()) {
    return ScoreMap::from_function(grid_size, [](double p) { return 1.0 - p; });
  }
  if (name == "constant") return ScoreMap::constant(grid_size, needs_arg());
  if (name == "shift") {
    const double d = needs_arg();
    return ScoreMap::from_function(grid_size,
                                   [d](double p) { return std::clamp(p + d, 0.0, 1.0); });
  }
  if (name == "power" || name == "stretch") {
    const double k = needs_arg();
    if (!(k > 0.0)) throw InvalidArgument("score map exponent must be positive");
    if (name == "power") {
      return ScoreMap::from_function(grid_size, [k](double p) { return std::pow(p, k); });
    }
    return ScoreMap::from_function(grid_size, [k](double p) {
      const double x = 2.0 * p - 1.0;
      return 0.5 + 0.5 * std::copysign(std::pow(std::abs(x), k), x);
    });
  }
  throw InvalidArgument("unknown score map '" + spec +
                        "' (identity, flip, constant:<v>, shift:<d>, power:<k>, stretch:<k>)");
}

ExperimentReport run_recommender_experiment(const ScoreMap& men_map, std::size_t grid_size,
                                            std::size_t mc_samples, std::uint64_t seed) {
  if (men_map.grid_size() != grid_size) {
    throw InvalidArgument("men's score map grid differs from the experiment grid");
  }
  const auto f = ScoreDensity::uniform(grid_size);
  const auto payoff = PayoffMatrix::recommender(0.0);
  const double threshold = optimal_threshold(payoff);
  const auto identity = ScoreMap::identity(grid_size);

  ExperimentReport report;
  report.id = "recommender";
  report.parameters.set_count("grid", grid_size);
  report.parameters.set_count("samples", mc_samples);
  report.parameters.set("seed", std::to_string(seed));
  report.add_metric("threshold", threshold);

  const double eu_women = long_run_eu(f, identity, payoff, threshold);
  const double eu_men = long_run_eu(f, men_map, payoff, threshold);
  report.add_metric("women.eu", eu_women);
  report.add_metric("men.eu", eu_men);
  const auto utility = make_utility_report({{kMen, eu_men}, {kWomen, eu_women}},
                                           kAnalyticParityTol);
  report.add_metric("disparity", utility.disparity);

  if (mc_samples > 0) {
    const auto mc_women = monte_carlo_eu(f, identity, payoff, threshold, mc_samples, seed);
    const auto mc_men = monte_carlo_eu(f, men_map, payoff, threshold, mc_samples, seed + 1);
    report.add_metric("women.eu_mc", mc_women.mean);
    report.add_metric("women.eu_mc_se", mc_women.standard_error);
    report.add_metric("men.eu_mc", mc_men.mean);
    report.add_metric("men.eu_mc_se", mc_men.standard_error);
    report.add_metric("disparity_mc", std::abs(mc_men.mean - mc_women.mean));
    const double band = 3.0 * std::hypot(mc_men.standard_error, mc_women.standard_error);
    report.add_metric("disparity_mc_tolerance", band);
    report.add_verdict("v1bis_mc", "disparity_mc", Comparison::kAtMost, band);
  }

  const auto men_cases = classify_cases(f, men_map, threshold, payoff);
  add_cases(report, "men", men_cases);
  report.add_metric("men.wrong_decision_mass", men_cases.wrong_mass());
  report.add_metric("men.loss_decomposition_residual",
                    std::abs((eu_women - eu_men) - men_cases.total_loss()));

  const PopulationModel calibrated({Group{kMen, ConditionalScoreDensity::calibrated(f)},
                                    Group{kWomen, ConditionalScoreDensity::calibrated(f)}});
  const auto displayed = apply_score_map(calibrated, kMen, men_map);
  const auto between = between_group_calibration_gap(displayed);
  report.add_metric("calibration.between.sup_gap", between.sup_gap);
  report.add_metric("calibration.between.l1_gap", between.l1_gap);
  report.add_metric("figure1.shaded_area", eu_women);

  report.add_verdict("v1bis", "disparity", Comparison::kAtMost, kAnalyticParityTol);
  report.add_verdict("between_group_calibration", "calibration.between.sup_gap",
                     Comparison::kAtMost, kCalibratedTol);

  report.series.push_back({"utility_act", linspace_series(101, [](double p) { return 2 * p - 1; })});
  report.series.push_back({"utility_decline", linspace_series(101, [](double) { return 0.0; })});
  report.series.push_back(
      {"utility_optimal", linspace_series(101, [](double p) { return std::max(0.0, 2 * p - 1); })});
  PlotSeries map_series{"men_map", {}};
  for (std::size_t i = 0; i < grid_size; ++i) {
    map_series.points.emplace_back(f.cell_midpoint(i), men_map.at(i));
  }
  report.series.push_back(std::move(map_series));
  return report;
}

ExperimentReport run_equal_rates_unequal_utility(double p_men, double p_women, double fp_mass) {
  const double threshold = 0.5;
  for (double p : {p_men, p_women}) {
    if (!(p >= 0.0 && p < threshold)) {
      throw InvalidArgument("p=" + format_number(p) +
                            " is not below 1/2, so acting on it is not a false positive");
    }
  }
  if (!(fp_mass >= 0.0 && fp_mass <= 0.5)) {
    throw InvalidArgument("false-positive mass must lie in [0, 1/2]");
  }
  const auto payoff = PayoffMatrix::recommender(0.0);

  // Half the mass sits below 1/2, half above. Of the lower half, fp_mass is
  // displayed at 0.9 (acted on, wrongly) and the rest is displayed honestly.
  auto atoms_for = [&](double p) {
    return std::vector<ScoredMass>{{p, 0.9, fp_mass}, {p, p, 0.5 - fp_mass}, {0.75, 0.75, 0.5}};
  };

  ExperimentReport report;
  report.id = "equal-rates";
  report.parameters.set("p_men", p_men);
  report.parameters.set("p_women", p_women);
  report.parameters.set("fp_mass", fp_mass);

  std::vector<GroupUtility> utilities;
  std::vector<ConfusionCounts> counts;
  for (const auto& [label, p] : {std::pair{kMen, p_men}, std::pair{kWomen, p_women}}) {
    const auto atoms = atoms_for(p);
    const auto cases = classify_cases(atoms, payoff, threshold);
    const double eu = long_run_eu(atoms, payoff, threshold);
    const auto r = rates(cases.as_confusion());
    report.add_metric(label + ".fpr", r.fpr);
    report.add_metric(label + ".fnr", r.fnr);
    report.add_metric(label + ".eu", eu);
    add_cases(report, label, cases);
    report.add_metric(label + ".loss_per_false_decision",
                      cases.cases[1].mass > 0.0
                          ? std::optional<double>(cases.cases[1].loss / cases.cases[1].mass)
                          : std::nullopt);
    utilities.push_back({label, eu});
    counts.push_back(cases.as_confusion());
  }
  const auto sep = separation_gap({kMen, kWomen}, counts);
  report.add_metric("rate_gap", sep.max_gap());
  const auto utility = make_utility_report(utilities, kAnalyticParityTol);
  report.add_metric("disparity", utility.disparity);
  report.add_metric("disparity_formula",
                    fp_mass * std::abs((2.0 * p_men - 1.0) - (2.0 * p_women - 1.0)));

  report.add_verdict("equal_rates", "rate_gap", Comparison::kAtMost, kEqualRatesTol);
  report.add_verdict("v1bis", "disparity", Comparison::kAtMost, kAnalyticParityTol);
  if (report.verdict("equal_rates").holds && !report.verdict("v1bis").holds) {
    report.notes.push_back("equal error rates with unequal expected utility");
  }
  return report;
}

PopulationModel judge_population(double base_rate_men, double base_rate_women,
                                 std::size_t grid_size) {
  return PopulationModel(
      {Group{kMen, ConditionalScoreDensity::calibrated_with_base_rate(grid_size, base_rate_men)},
       Group{kWomen,
             ConditionalScoreDensity::calibrated_with_base_rate(grid_size, base_rate_women)}});
}

DecisionRule judge_rule(const PopulationModel& pop, double reference_threshold) {
  try {
    return solve_equalized_odds(pop, kWomen, Deterministic{reference_threshold});
  } catch (const InfeasibleError&) {
    return solve_equalized_odds(pop, kMen, Deterministic{reference_threshold});
  }
}

ExperimentReport run_judge_experiment(double base_rate_men, double base_rate_women,
                                      double reference_threshold, Convention convention,
                                      std::size_t grid_size) {
  const auto pop = judge_population(base_rate_men, base_rate_women, grid_size);
  const auto rule = judge_rule(pop, reference_threshold);

  ExperimentReport report;
  report.id = "judge";
  report.parameters.set("base_rate_m", base_rate_men);
  report.parameters.set("base_rate_f", base_rate_women);
  report.parameters.set("reference_t", reference_threshold);
  report.parameters.set("convention", to_string(convention));
  report.parameters.set_count("grid", grid_size);
  const auto* women_policy = std::get_if<Deterministic>(&rule.policy(kWomen));
  report.parameters.set("reference_group",
                        women_policy && women_policy->threshold == reference_threshold ? kWomen
                                                                                       : kMen);

  for (const auto& g : pop.groups()) {
    report.add_metric(g.label + ".base_rate", g.density.base_rate());
    report.add_metric(g.label + ".within_calibration_sup_error",
                      within_group_calibration_error(pop, g.label).sup_error);
  }

  const auto sep = separation_gap(pop, rule);
  for (std::size_t g = 0; g < sep.groups.size(); ++g) {
    report.add_metric(sep.groups[g] + ".fpr", sep.rates[g].fpr);
    report.add_metric(sep.groups[g] + ".fnr", sep.rates[g].fnr);
  }
  report.add_metric("separation.fpr_gap", sep.fpr_gap);
  report.add_metric("separation.fnr_gap", sep.fnr_gap);
  report.add_metric("separation.max_gap", sep.max_gap());

  // Calibration of the coarsened score R, measured on the two-cell population.
  const auto coarse = coarsen(pop, rule);
  const auto suff = sufficiency_gap_binary(coarse, DecisionRule::shared_threshold(coarse.labels(), 0.5));
  report.add_metric("sufficiency.r1_gap", suff.positive_gap);
  report.add_metric("sufficiency.r0_gap", suff.negative_gap);
  report.add_metric("sufficiency.max_gap", suff.max_gap());
  report.add_metric("sufficiency.direct_max_gap", sufficiency_gap_binary(pop, rule).max_gap());
  report.add_metric("coarse_calibration.sup_gap", between_group_calibration_gap(coarse).sup_gap);

  for (Convention c : {Convention::kPerOutcome, Convention::kPerPerson}) {
    const auto harm = judge_disutility(pop, rule, c);
    const std::string key = "disutility." + to_string(c);
    for (const auto& g : harm.groups) report.add_metric(key + "." + g.group, g.value);
    report.add_metric(key + ".disparity", harm.disparity);
  }

  report.add_verdict("separation", "separation.max_gap", Comparison::kAtMost, kSeparationTol);
  report.add_verdict("sufficiency", "sufficiency.max_gap", Comparison::kAtMost, kSeparationTol);
  const std::string chosen = "disutility." + to_string(convention) + ".disparity";
  const auto& v1bis = report.add_verdict("v1bis", chosen, Comparison::kAtMost, kAnalyticParityTol);
  const bool v1bis_holds = v1bis.holds;

  if (convention == Convention::kPerPerson) {
    const auto parity = solve_parity_ratio(pop, kWomen, Deterministic{reference_threshold});
    const auto harm = judge_disutility(pop, parity, Convention::kPerPerson);
    report.add_metric("parity_ratio.disutility.per-person.disparity", harm.disparity);
    report.add_metric("parity_ratio.separation.max_gap", separation_gap(pop, parity).max_gap());
    report.add_metric("parity_ratio.men.threshold",
                      std::get<Deterministic>(parity.policy(kMen)).threshold);
    report.add_verdict("v1bis_parity_ratio", "parity_ratio.disutility.per-person.disparity",
                       Comparison::kAtMost, kAnalyticParityTol);
    report.notes.push_back("parity-ratio rule: " + one_line(parity));
  }

  report.notes.push_back("equalized-odds rule: " + one_line(rule));
  if (v1bis_holds && !report.verdict("sufficiency").holds) {
    report.notes.push_back("not prima facie wrongful discrimination under the " +
                           to_string(convention) + " convention");
  } else if (!v1bis_holds) {
    report.notes.push_back("unequal expected harm under the " + to_string(convention) +
                           " convention");
  }

  for (const auto& g : pop.groups()) {
    report.series.push_back({"roc_" + g.label, roc_series(g.density, 101)});
  }
  const auto op = roc_point(pop.group(kWomen).density, rule.policy(kWomen));
  report.series.push_back({"operating_point", {{op.fpr, op.tpr}}});
  return report;
}

AppendixSetup appendix_setup(std::size_t grid_size) {
  AppendixSetup setup{judge_population(0.3, 0.6, grid_size), {}, 0.0, 0.5};
  setup.rule = solve_parity_ratio(setup.population, kWomen, Deterministic{setup.women_threshold});
  setup.men_threshold = std::get<Deterministic>(setup.rule.policy(kMen)).threshold;
  return setup;
}

ScoreDensity bimodal_reshape(const ScoreDensity& f0, double low, double high,
                             double half_width) {
  if (!(half_width > 0.0) || low - half_width < 0.0 || high + half_width > 1.0 || !(low < high)) {
    throw InvalidArgument("bumps must satisfy 0 <= low-w < high+w <= 1");
  }
  const double mass = f0.mass();
  if (!(mass > 0.0)) throw InvalidArgument("cannot reshape an empty density");
  const double mean = f0.first_moment() / mass;
  const auto b_low = normalized_triangle(f0.grid_size(), low, half_width);
  const auto b_high = normalized_triangle(f0.grid_size(), high, half_width);
  const double m_low = b_low.first_moment();
  const double m_high = b_high.first_moment();
  if (!(m_low < mean && mean < m_high)) {
    throw InvalidArgument("bump centres must bracket the mean " + format_number(mean));
  }
  const double alpha = (m_high - mean) / (m_high - m_low);
  std::vector<double> w(f0.grid_size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = mass * (alpha * b_low.weight(i) + (1.0 - alpha) * b_high.weight(i));
  }
  return ScoreDensity(std::move(w));
}

ReshapeComparison compare_reshape(const PopulationModel& a, const ScoreDensity& reshaped_f0,
                                  const DecisionRule& rule) {
  const auto& men = a.group(kMen).density;
  const auto& women = a.group(kWomen).density;
  if (std::abs(reshaped_f0.mass() - men.f0().mass()) > kAlgebraicTol ||
      std::abs(reshaped_f0.first_moment() - men.f0().first_moment()) > kAlgebraicTol) {
    throw InvalidArgument("reshaped density must keep the mass and mean of f_{m,0}");
  }
  const ConditionalScoreDensity men_b(reshaped_f0, men.f1());
  const auto& men_policy = rule.policy(kMen);

  const auto c_a = confusion(men, men_policy);
  const auto c_b = confusion(men_b, men_policy);
  const auto c_f = confusion(women, rule.policy(kWomen));

  ReshapeComparison out;
  out.eq_star_gap_a = std::abs(c_a.fn - c_f.fn);
  out.eq_star_gap_b = std::abs(c_b.fn - c_f.fn);
  out.x_a_men = predictive_values(c_a).given_negative.value_or(0.0);
  out.x_b_men = predictive_values(c_b).given_negative.value_or(0.0);
  out.x_women = predictive_values(c_f).given_negative.value_or(0.0);
  out.eq_double_star_gap_a = std::abs(out.x_a_men - out.x_women);
  out.eq_double_star_gap_b = std::abs(out.x_b_men - out.x_women);
  out.shifted_mass = accepted_mass(reshaped_f0, men_policy) - accepted_mass(men.f0(), men_policy);
  return out;
}

ExperimentReport run_appendix_counterexample(std::size_t grid_size, std::size_t reshapes,
                                             std::uint64_t seed) {
  const auto setup = appendix_setup(grid_size);
  const auto& f0 = setup.population.group(kMen).density.f0();
  const double mean = f0.first_moment() / f0.mass();
  const double t = setup.men_threshold;

  ExperimentReport report;
  report.id = "appendix";
  report.parameters.set_count("grid", grid_size);
  report.parameters.set_count("reshapes", reshapes);
  report.parameters.set("seed", std::to_string(seed));
  report.add_metric("men.base_rate", setup.population.group(kMen).density.base_rate());
  report.add_metric("women.base_rate", setup.population.group(kWomen).density.base_rate());
  report.add_metric("men.threshold", t);
  report.add_metric("women.threshold", setup.women_threshold);
  report.add_metric("men.f0_mean", mean);

  // Population B: one bump well below the men's threshold, one well above.
  constexpr double kHalfWidth = 0.08;
  const double low = std::max(kHalfWidth, std::min(mean, t) - 0.15);
  const double high = std::min(1.0 - kHalfWidth, std::max(mean, t) + 0.15);
  const auto f0_b = bimodal_reshape(f0, low, high, kHalfWidth);
  const auto cmp = compare_reshape(setup.population, f0_b, setup.rule);
  report.parameters.set("reshape.low", low);
  report.parameters.set("reshape.high", high);
  report.parameters.set("reshape.half_width", kHalfWidth);

  report.add_metric("a.eq_star_gap", cmp.eq_star_gap_a);
  report.add_metric("b.eq_star_gap", cmp.eq_star_gap_b);
  report.add_metric("a.x_men", cmp.x_a_men);
  report.add_metric("b.x_men", cmp.x_b_men);
  report.add_metric("x_women", cmp.x_women);
  report.add_metric("x_gap", std::abs(cmp.x_a_men - cmp.x_b_men));
  report.add_metric("a.eq_double_star_gap", cmp.eq_double_star_gap_a);
  report.add_metric("b.eq_double_star_gap", cmp.eq_double_star_gap_b);
  report.add_metric("b.shifted_mass", cmp.shifted_mass);
  report.add_metric("b.f0_mean_difference",
                    std::abs(f0_b.first_moment() / f0_b.mass() - mean));

  // Random mean-preserving reshapes; those moving mass above the threshold
  // count toward the sweep.
  std::size_t crossing = 0;
  std::size_t generated = 0;
  std::size_t double_star_holds = 0;
  double sweep_star_max = 0.0;
  double sweep_double_star_min = std::numeric_limits<double>::infinity();
  for (std::size_t attempt = 0; crossing < reshapes && attempt < reshapes * 100; ++attempt) {
    auto rng = kernels::chunk_engine(seed, attempt);
    const double hw = 0.02 + 0.08 * kernels::unit(rng);
    const double low_hi = std::min(t - hw, mean - 0.01);
    const double high_lo = std::max(t + hw, mean + 0.01);
    if (low_hi <= hw || high_lo >= 1.0 - hw) continue;
    const double lo_c = hw + (low_hi - hw) * kernels::unit(rng);
    const double hi_c = high_lo + (1.0 - hw - high_lo) * kernels::unit(rng);
    ReshapeComparison r;
    try {
      r = compare_reshape(setup.population, bimodal_reshape(f0, lo_c, hi_c, hw), setup.rule);
    } catch (const InvalidArgument&) {
      continue;
    }
    ++generated;
    if (r.eq_double_star_gap_b <= kCrossingTol) ++double_star_holds;
    if (!(r.shifted_mass > kCrossingTol)) continue;
    ++crossing;
    sweep_star_max = std::max(sweep_star_max, r.eq_star_gap_b);
    sweep_double_star_min = std::min(sweep_double_star_min, r.eq_double_star_gap_b);
  }
  report.add_metric("sweep.generated", static_cast<double>(generated));
  report.add_metric("sweep.crossing", static_cast<double>(crossing));
  report.add_metric("sweep.eq_star_max_gap", sweep_star_max);
  report.add_metric("sweep.eq_double_star_min_gap",
                    crossing > 0 ? std::optional<double>(sweep_double_star_min) : std::nullopt);
  report.add_metric("sweep.eq_double_star_holding_fraction",
                    generated > 0 ? std::optional<double>(static_cast<double>(double_star_holds) /
                                                          static_cast<double>(generated))
                                  : std::nullopt);

  report.add_verdict("eq_star_a", "a.eq_star_gap", Comparison::kAtMost, kSeparationTol);
  report.add_verdict("eq_star_b", "b.eq_star_gap", Comparison::kAtMost, kSeparationTol);
  report.add_verdict("x_changes", "x_gap", Comparison::kAbove, kXGapMin);
  report.add_verdict("sweep_eq_star", "sweep.eq_star_max_gap", Comparison::kAtMost,
                     kSeparationTol);
  if (crossing > 0) {
    report.add_verdict("sweep_eq_double_star_fails", "sweep.eq_double_star_min_gap",
                       Comparison::kAbove, kCrossingTol);
  }
  report.notes.push_back(
      "f_{m,0} of A is (1-s) times the men's calibrated score density; B mixes two "
      "triangular bumps with the same mass and mean");

  PlotSeries sa{"figure2_f_m0_a", {}};
  PlotSeries sb{"figure2_f_m0_b", {}};
  for (std::size_t i = 0; i < grid_size; ++i) {
    sa.points.emplace_back(f0.cell_midpoint(i), f0.weight(i));
    sb.points.emplace_back(f0.cell_midpoint(i), f0_b.weight(i));
  }
  report.series.push_back(std::move(sa));
  report.series.push_back(std::move(sb));
  return report;
}

ExperimentReport run_impossibility_sweep(std::size_t populations, std::size_t grid_size,
                                         std::uint64_t seed) {
  struct Outcome {
    bool ok = false;
    int redraws = 0;
    ImpossibilityWitness witness;
  };
  std::vector<Outcome> outcomes(populations);

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(populations); ++i) {
    auto rng = kernels::chunk_engine(seed, static_cast<std::size_t>(i));
    Outcome& out = outcomes[static_cast<std::size_t>(i)];
    for (int attempt = 0; attempt < 200 && !out.ok; ++attempt) {
      const auto a = random_calibrated(grid_size, rng);
      const auto b = random_calibrated(grid_size, rng);
      if (std::abs(a.base_rate() - b.base_rate()) < 0.05) {
        ++out.redraws;
        continue;
      }
      const PopulationModel pop({Group{"a", a}, Group{"b", b}});
      const double t = 0.25 + 0.5 * kernels::unit(rng);
      for (const char* reference : {"a", "b"}) {
        try {
          const auto rule = solve_equalized_odds(pop, reference, Deterministic{t});
          out.witness = impossibility_witness(pop, rule);
          out.ok = true;
          break;
        } catch (const InfeasibleError&) {
        }
      }
      if (!out.ok) ++out.redraws;
    }
  }

  ExperimentReport report;
  report.id = "impossibility";
  report.parameters.set_count("populations", populations);
  report.parameters.set_count("grid", grid_size);
  report.parameters.set("seed", std::to_string(seed));

  std::size_t solved = 0;
  std::size_t counterexamples = 0;
  std::size_t redraws = 0;
  double max_sep = 0.0;
  double min_suff = std::numeric_limits<double>::infinity();
  double min_base_gap = std::numeric_limits<double>::infinity();
  for (const auto& o : outcomes) {
    redraws += static_cast<std::size_t>(o.redraws);
    if (!o.ok) continue;
    ++solved;
    max_sep = std::max(max_sep, o.witness.separation_gap);
    min_suff = std::min(min_suff, o.witness.sufficiency_gap);
    min_base_gap = std::min(min_base_gap, o.witness.base_rate_gap);
    if (!o.witness.consistent || o.witness.sufficiency_gap < kSufficiencyFloor) ++counterexamples;
  }
  report.add_metric("solved", static_cast<double>(solved));
  report.add_metric("unsolved", static_cast<double>(populations - solved));
  report.add_metric("redraws", static_cast<double>(redraws));
  report.add_metric("max_separation_gap", max_sep);
  report.add_metric("min_sufficiency_gap", solved ? std::optional<double>(min_suff) : std::nullopt);
  report.add_metric("min_base_rate_gap", solved ? std::optional<double>(min_base_gap) : std::nullopt);
  report.add_metric("counterexamples", static_cast<double>(counterexamples));

  report.add_verdict("all_solved", "unsolved", Comparison::kAtMost, 0.0);
  report.add_verdict("separation", "max_separation_gap", Comparison::kAtMost, kSeparationTol);
  if (solved > 0) {
    report.add_verdict("sufficiency_violated", "min_sufficiency_gap", Comparison::kAbove,
                       kSufficiencyFloor);
  }
  report.add_verdict("no_counterexample", "counterexamples", Comparison::kAtMost, 0.0);
  return report;
}

std::vector<std::string> experiment_ids() {
  return {"recommender", "equal-rates", "judge", "appendix", "impossibility"};
}

}  // namespace fairness
