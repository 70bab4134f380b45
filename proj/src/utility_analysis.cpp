#include "fairness/utility_analysis.hpp"

#include <algorithm>
#include <cmath>

#include "fairness/errors.hpp"
#include "fairness/kernels.hpp"

namespace fairness {

namespace {

void require_normalized(const ScoreDensity& d) {
  if (std::abs(d.mass() - 1.0) > kAlgebraicTol) {
    throw InvalidArgument("true-probability density must integrate to 1");
  }
}

void require_same_grid(const ScoreDensity& d, const ScoreMap& m) {
  if (d.grid_size() != m.grid_size()) {
    throw InvalidArgument("score map and density grids differ");
  }
}

}  // namespace

PayoffMatrix PayoffMatrix::recommender(double outside_option) {
  PayoffMatrix p;
  p.u11 = 1.0;
  p.u10 = -1.0;
  p.u01 = outside_option;
  p.u00 = outside_option;
  p.outside = outside_option;
  return p;
}

double pointwise_eu(double p, const PayoffMatrix& payoff, bool decision) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("probability must lie in [0,1]");
  return decision ? payoff.act(p) : payoff.decline(p);
}

double optimal_threshold(const PayoffMatrix& payoff) {
  // gain(p) = act(p) - decline(p) is affine in p.
  const double gain0 = payoff.act(0.0) - payoff.decline(0.0);
  const double slope = (payoff.act(1.0) - payoff.decline(1.0)) - gain0;
  if (!(slope > 0.0)) {
    throw InvalidArgument("acting must gain more when y=1 than when y=0");
  }
  return std::clamp(-gain0 / slope, 0.0, 1.0);
}

std::vector<ScoredMass> scored_masses(const ScoreDensity& true_density, const ScoreMap& map) {
  require_same_grid(true_density, map);
  std::vector<ScoredMass> atoms(true_density.grid_size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    atoms[i] = ScoredMass{true_density.cell_midpoint(i), map.at(i), true_density.cell_mass(i)};
  }
  return atoms;
}

double long_run_eu(std::span<const ScoredMass> atoms, const PayoffMatrix& payoff,
                   double threshold) {
  double total = 0.0;
  for (const auto& a : atoms) {
    if (a.mass == 0.0) continue;
    total += a.mass * pointwise_eu(a.p, payoff, a.s > threshold);
  }
  return total;
}

double long_run_eu(const ScoreDensity& true_density, const ScoreMap& displayed,
                   const PayoffMatrix& payoff, double threshold) {
  require_normalized(true_density);
  const auto atoms = scored_masses(true_density, displayed);
  return long_run_eu(atoms, payoff, threshold);
}

double CaseBreakdown::total_loss() const {
  double t = 0.0;
  for (const auto& c : cases) t += c.loss;
  return t;
}

ConfusionCounts CaseBreakdown::as_confusion() const {
  return ConfusionCounts{cases[3].mass, cases[1].mass, cases[2].mass, cases[0].mass};
}

CaseBreakdown classify_cases(std::span<const ScoredMass> atoms, const PayoffMatrix& payoff,
                             double threshold) {
  CaseBreakdown out;
  for (const auto& a : atoms) {
    if (a.mass == 0.0) continue;
    const bool should_act = a.p > threshold;
    const bool acts = a.s > threshold;
    const int idx = (should_act ? 2 : 0) + (acts ? 1 : 0);
    CaseTally& tally = out.cases[idx];
    tally.mass += a.mass;
    if (acts != should_act) {
      const double gain = payoff.act(a.p) - payoff.decline(a.p);
      tally.loss += a.mass * (acts ? -gain : gain);
    }
  }
  return out;
}

CaseBreakdown classify_cases(const ScoreDensity& true_density, const ScoreMap& displayed,
                             double threshold, const PayoffMatrix& payoff) {
  require_normalized(true_density);
  const auto atoms = scored_masses(true_density, displayed);
  return classify_cases(atoms, payoff, threshold);
}

MonteCarloEstimate monte_carlo_eu(const ScoreDensity& true_density, const ScoreMap& displayed,
                                  const PayoffMatrix& payoff, double threshold,
                                  std::size_t samples, std::uint64_t seed) {
  require_normalized(true_density);
  return kernels::utility_parallel(true_density, displayed, payoff, threshold, samples, seed);
}

std::string to_string(Convention c) {
  return c == Convention::kPerOutcome ? "per-outcome" : "per-person";
}

Convention parse_convention(const std::string& text) {
  if (text == "per-outcome") return Convention::kPerOutcome;
  if (text == "per-person") return Convention::kPerPerson;
  throw InvalidArgument("convention must be per-outcome or per-person, got '" + text + "'");
}

double UtilityReport::value(const std::string& group) const {
  for (const auto& g : groups) {
    if (g.group == group) return g.value;
  }
  throw UnknownGroupError(group);
}

UtilityReport make_utility_report(std::vector<GroupUtility> groups, double tolerance) {
  UtilityReport r;
  r.groups = std::move(groups);
  r.tolerance = tolerance;
  if (!r.groups.empty()) {
    const auto [lo, hi] = std::minmax_element(
        r.groups.begin(), r.groups.end(),
        [](const GroupUtility& a, const GroupUtility& b) { return a.value < b.value; });
    r.disparity = hi->value - lo->value;
  }
  r.verdict = r.disparity <= tolerance;
  return r;
}

UtilityReport judge_disutility(const PopulationModel& pop, const DecisionRule& rule,
                               Convention convention, double tolerance) {
  std::vector<GroupUtility> values;
  for (const auto& g : pop.groups()) {
    const auto c = confusion(g.density, rule.policy(g.label));
    double harm = 0.0;
    if (convention == Convention::kPerOutcome) {
      const auto fnr = rates(c).fnr;
      if (!fnr) {
        throw InvalidArgument("group '" + g.label +
                              "' has zero base rate; per-outcome disutility is undefined");
      }
      harm = *fnr;
    } else {
      harm = c.fn;
    }
    values.push_back(GroupUtility{g.label, harm});
  }
  return make_utility_report(std::move(values), tolerance);
}

Verdict disparity_verdict(const UtilityReport& report, double tolerance) {
  return Verdict{report.disparity <= tolerance, report.disparity};
}

}  // namespace fairness
