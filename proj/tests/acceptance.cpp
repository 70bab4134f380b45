// One PASS/FAIL line per acceptance criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include "fairness/audit_dataset.hpp"
#include "fairness/case_studies.hpp"
#include "fairness/errors.hpp"
#include "fairness/fairness_metrics.hpp"
#include "fairness/sampling.hpp"
#include "fairness/utility_analysis.hpp"

using namespace fairness;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int failures = 0;

void criterion(int id, const char* name, double limit_seconds,
               const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o{false, ""};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_seconds > 0 && secs >= limit_seconds) {
    o.pass = false;
    o.detail += " over time limit";
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d (%s): %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", id, name,
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

// P[D=0, Y=1] by sub-sampled quadrature of decide() over the cell weights.
double joint_negative(const ConditionalScoreDensity& d, const GroupPolicy& policy) {
  const std::size_t sub = 1024;
  double total = 0.0;
  for (std::size_t i = 0; i < d.grid_size(); ++i) {
    const double h = d.f1().cell_width() / sub;
    for (std::size_t k = 0; k < sub; ++k) {
      const double s = d.f1().cell_lower(i) + (k + 0.5) * h;
      total += (1.0 - decide(policy, s)) * d.f1().weight(i) * h;
    }
  }
  return total;
}

ScoreMap random_map(std::mt19937_64& rng, std::size_t grid) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (rng() % 4) {
    case 0: return ScoreMap::constant(grid, u(rng));
    case 1: {
      const double d = 0.6 * u(rng) - 0.3;
      return ScoreMap::from_function(grid, [d](double p) { return std::clamp(p + d, 0.0, 1.0); });
    }
    case 2: {
      const double k = 0.2 + 3.8 * u(rng);
      return ScoreMap::from_function(grid, [k](double p) {
        const double x = 2 * p - 1;
        return 0.5 + 0.5 * std::copysign(std::pow(std::abs(x), k), x);
      });
    }
    default: {
      std::vector<double> v(grid);
      for (double& x : v) x = u(rng);
      return ScoreMap(v);
    }
  }
}

ScoreDensity random_density(std::mt19937_64& rng, std::size_t grid) {
  std::uniform_real_distribution<double> u(0.2, 3.0);
  const double a = u(rng), b = u(rng), c = u(rng);
  auto f = ScoreDensity::from_function(grid, [&](double s) {
    return a * (1 - s) * (1 - s) + b * 2 * s * (1 - s) + c * s * s;
  });
  return f.scaled(1.0 / f.mass());
}

// Largest deviation between empirical metrics of a sample round-tripped
// through CSV and the analytic metrics of the generating population.
double audit_deviation(const PopulationModel& pop, const DecisionRule& rule,
                       const std::string& tag) {
  const auto path = std::filesystem::temp_directory_path() / ("acceptance_" + tag + ".csv");
  sample(pop, 1'000'000, kDefaultSeed, rule).save_csv(path.string());
  const auto data = AuditDataset::load_csv(path.string());
  std::filesystem::remove(path);

  double worst = 0.0;
  auto track = [&](std::optional<double> a, std::optional<double> b) {
    if (a.has_value() != b.has_value()) {
      worst = std::max(worst, 1.0);
    } else if (a) {
      worst = std::max(worst, std::abs(*a - *b));
    }
  };
  const auto sep_a = separation_gap(pop, rule);
  const auto sep_e = separation_gap(data);
  const auto suf_a = sufficiency_gap_binary(pop, rule);
  const auto suf_e = sufficiency_gap_binary(data);
  for (const auto& label : pop.labels()) {
    const std::size_t ia = pop.index_of(label);
    const std::size_t ie = data.index_of(label);
    track(sep_a.rates[ia].fpr, sep_e.rates[ie].fpr);
    track(sep_a.rates[ia].fnr, sep_e.rates[ie].fnr);
    track(suf_a.values[ia].given_positive, suf_e.values[ie].given_positive);
    track(suf_a.values[ia].given_negative, suf_e.values[ie].given_negative);
    const auto c = confusion(data, label);
    track(pop.group(label).density.base_rate(), (c.tp + c.fn) / c.total());
    track(within_group_calibration_error(pop, label, kDefaultBins).sup_error,
          within_group_calibration_error(data, label, kDefaultBins).sup_error);
  }
  const auto cal_a = between_group_calibration_gap(pop, kDefaultBins);
  const auto cal_e = between_group_calibration_gap(data, kDefaultBins);
  for (std::size_t k = 0; k < kDefaultBins; ++k) {
    // Bins with almost no mass have no stable empirical rate.
    if (cal_a.bins[k].mass < 0.01) continue;
    for (const auto& label : pop.labels()) {
      track(cal_a.bins[k].group_rate[pop.index_of(label)],
            cal_e.bins[k].group_rate[data.index_of(label)]);
    }
  }
  track(sep_a.fpr_gap, sep_e.fpr_gap);
  track(sep_a.fnr_gap, sep_e.fnr_gap);
  track(suf_a.max_gap(), suf_e.max_gap());
  return worst;
}

}  // namespace

int main() {
  criterion(1, "recommender optimum", 5.0, [] {
    const auto f = ScoreDensity::uniform(1024);
    const auto pay = PayoffMatrix::recommender();
    const double eu = long_run_eu(f, ScoreMap::identity(1024), pay, 0.5);
    const auto mc = monte_carlo_eu(f, ScoreMap::identity(1024), pay, 0.5, 1'000'000, kDefaultSeed);
    const bool ok = std::abs(eu - 0.25) <= 1e-4 && std::abs(mc.mean - 0.25) <= 0.01;
    return Outcome{ok, "analytic " + fmt("%.12g", eu) + ", monte carlo " + fmt("%.6f", mc.mean)};
  });

  criterion(2, "calibration dominance", 30.0, [] {
    std::mt19937_64 rng(2024);
    const auto pay = PayoffMatrix::recommender();
    int maps = 0, violations = 0, mismatches = 0, equalities = 0;
    double worst_excess = -1.0;
    for (; maps < 400; ++maps) {
      const auto f = random_density(rng, 1024);
      const auto map = random_map(rng, 1024);
      const double cal = long_run_eu(f, ScoreMap::identity(1024), pay, 0.5);
      const double mis = long_run_eu(f, map, pay, 0.5);
      const auto cases = classify_cases(f, map, 0.5, pay);
      worst_excess = std::max(worst_excess, mis - cal);
      if (mis > cal + 1e-9) ++violations;
      const bool equal = std::abs(mis - cal) <= 1e-9;
      const bool zero_wrong = cases.cases[1].mass == 0.0 && cases.cases[2].mass == 0.0;
      equalities += equal;
      if (equal != zero_wrong) ++mismatches;
    }
    return Outcome{violations == 0 && mismatches == 0,
                   std::to_string(maps) + " maps, " + std::to_string(equalities) +
                       " equalities, max excess " + fmt("%.3g", worst_excess) + ", " +
                       std::to_string(mismatches) + " equality/case mismatches"};
  });

  criterion(3, "equal rates, unequal harm", 0, [] {
    const auto r = run_equal_rates_unequal_utility(0.1, 0.4, 0.1);
    const double oracle = 0.1 * std::abs((2 * 0.1 - 1) - (2 * 0.4 - 1));
    const bool same_rates = r.metric("men.fpr") == r.metric("women.fpr") &&
                            r.metric("men.fnr") == r.metric("women.fnr");
    const double err = std::abs(r.metric("disparity") - oracle);
    return Outcome{same_rates && err <= 1e-9,
                   "fpr " + fmt("%.12g", r.metric("men.fpr")) + " both, disparity " +
                       fmt("%.12g", r.metric("disparity")) + " vs " + fmt("%.12g", oracle)};
  });

  criterion(4, "judge conjunction", 5.0, [] {
    const auto r = run_judge_experiment(0.3, 0.6, 0.5, Convention::kPerOutcome, 1024);
    const double sep = r.metric("separation.max_gap");
    const double suff = r.metric("sufficiency.max_gap");
    const double disp = r.metric("disutility.per-outcome.disparity");
    return Outcome{sep <= 1e-6 && suff >= 1e-3 && disp == 0.0,
                   "separation " + fmt("%.3g", sep) + ", sufficiency " + fmt("%.6g", suff) +
                       ", per-outcome disparity " + fmt("%.17g", disp)};
  });

  criterion(5, "impossibility sweep", 60.0, [] {
    const auto r = run_impossibility_sweep(500, 256, kDefaultSeed);
    const double below = r.metric("counterexamples");
    const bool ok = r.metric("solved") == 500 && below == 0 &&
                    r.metric("min_base_rate_gap") >= 0.05 &&
                    r.metric("max_separation_gap") <= 1e-6;
    return Outcome{ok, fmt("%.0f", r.metric("solved")) + " populations, min sufficiency gap " +
                           fmt("%.6g", r.metric("min_sufficiency_gap")) + ", " +
                           fmt("%.0f", below) + " below 1e-4"};
  });

  criterion(6, "appendix counterexample", 0, [] {
    const auto r = run_appendix_counterexample(1024, 100, kDefaultSeed);
    const bool ok = r.metric("a.eq_star_gap") <= 1e-6 && r.metric("b.eq_star_gap") <= 1e-6 &&
                    r.metric("x_gap") > 0.01 && r.metric("sweep.crossing") == 100 &&
                    r.metric("sweep.eq_star_max_gap") <= 1e-6 &&
                    r.metric("sweep.eq_double_star_min_gap") > 1e-3;
    return Outcome{ok, "(*) gaps " + fmt("%.3g", r.metric("a.eq_star_gap")) + "/" +
                           fmt("%.3g", r.metric("b.eq_star_gap")) + ", x gap " +
                           fmt("%.6g", r.metric("x_gap")) + ", sweep " +
                           fmt("%.0f", r.metric("sweep.crossing")) + " crossing, min (**) gap " +
                           fmt("%.6g", r.metric("sweep.eq_double_star_min_gap"))};
  });

  criterion(7, "convention split", 0, [] {
    const auto pop = judge_population(0.3, 0.6, 1024);
    const auto eo = judge_rule(pop, 0.5);
    const double fnr_m = *rates(confusion(pop, eo, kMen)).fnr;
    const double fnr_f = *rates(confusion(pop, eo, kWomen)).fnr;
    const double outcome = judge_disutility(pop, eo, Convention::kPerOutcome).disparity;
    const double person = judge_disutility(pop, eo, Convention::kPerPerson).disparity;
    const auto parity = solve_parity_ratio(pop, kWomen, Deterministic{0.5});
    const double oracle = std::abs(joint_negative(pop.group(kMen).density, parity.policy(kMen)) -
                                   joint_negative(pop.group(kWomen).density, parity.policy(kWomen)));
    const bool ok = fnr_m == fnr_f && outcome == 0.0 && person > 1e-6 && oracle <= 1e-6;
    return Outcome{ok, "per-outcome " + fmt("%.3g", outcome) + ", per-person " +
                           fmt("%.6g", person) + ", after parity-ratio rule " +
                           fmt("%.3g", oracle)};
  });

  criterion(8, "empirical/analytic coherence", 0, [] {
    double worst = 0.0;
    {
      const auto pop = judge_population(0.3, 0.6, 1024);
      worst = std::max(worst, audit_deviation(pop, judge_rule(pop, 0.5), "judge"));
    }
    {
      const auto setup = appendix_setup(1024);
      worst = std::max(worst, audit_deviation(setup.population, setup.rule, "appendix"));
    }
    {
      const auto d = ConditionalScoreDensity::calibrated(ScoreDensity::uniform(1024));
      const PopulationModel pop({Group{kMen, d}, Group{kWomen, d}});
      const auto shown = apply_score_map(pop, kMen, parse_score_map("shift:0.2", 1024));
      worst = std::max(worst, audit_deviation(
                                  shown, DecisionRule::shared_threshold(shown.labels(), 0.5),
                                  "recommender"));
    }
    return Outcome{worst < 0.01, "sup deviation " + fmt("%.6g", worst)};
  });

  return failures == 0 ? 0 : 1;
}
