#pragma once

// Expected utility of acting on scores: the recommender model (a viewer acts
// on a displayed score, possibly miscalibrated) and the judge model (expected
// harm of wrongful detention per group).

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairness/decision_rules.hpp"
#include "fairness/score_model.hpp"

namespace fairness {

// U(d, y). When `outside` is set, declining (d=0) yields `outside` whatever y.
struct PayoffMatrix {
  double u11 = 1.0;
  double u10 = -1.0;
  double u01 = 0.0;
  double u00 = 0.0;
  std::optional<double> outside;

  // +1 for a liked movie, -1 for a disliked one, `outside_option` for not
  // watching.
  static PayoffMatrix recommender(double outside_option = 0.0);

  double act(double p) const { return p * u11 + (1.0 - p) * u10; }
  double decline(double p) const {
    return outside ? *outside : p * u01 + (1.0 - p) * u00;
  }
  // Realized utility for one draw.
  double realized(bool d, bool y) const {
    if (d) return y ? u11 : u10;
    if (outside) return *outside;
    return y ? u01 : u00;
  }
};

double pointwise_eu(double p, const PayoffMatrix& payoff, bool decision);

// Probability above which acting beats declining. Throws InvalidArgument
// when acting never gains more under y=1 than under y=0.
double optimal_threshold(const PayoffMatrix& payoff);

// One atom of decision mass: true probability p, displayed score s.
struct ScoredMass {
  double p = 0.0;
  double s = 0.0;
  double mass = 0.0;
};

// One atom per cell of `true_density`, carrying the cell's mass at its
// midpoint and displaying map.at(cell).
std::vector<ScoredMass> scored_masses(const ScoreDensity& true_density, const ScoreMap& map);

// Long-run expected utility of acting iff the displayed score exceeds
// `threshold`.
double long_run_eu(std::span<const ScoredMass> atoms, const PayoffMatrix& payoff,
                   double threshold);
double long_run_eu(const ScoreDensity& true_density, const ScoreMap& displayed,
                   const PayoffMatrix& payoff, double threshold);

struct CaseTally {
  double mass = 0.0;
  double loss = 0.0;
};

// Decision outcomes relative to deciding on the true probability:
// case 1 s<=T,p<=T; case 2 s>T,p<=T; case 3 s<=T,p>T; case 4 s>T,p>T.
struct CaseBreakdown {
  std::array<CaseTally, 4> cases{};

  double total_loss() const;
  double wrong_mass() const { return cases[1].mass + cases[2].mass; }
  // tp=case 4, fp=case 2, fn=case 3, tn=case 1: errors measured against the
  // decision the true probability calls for.
  ConfusionCounts as_confusion() const;
};

CaseBreakdown classify_cases(std::span<const ScoredMass> atoms, const PayoffMatrix& payoff,
                             double threshold);
CaseBreakdown classify_cases(const ScoreDensity& true_density, const ScoreMap& displayed,
                             double threshold,
                             const PayoffMatrix& payoff = PayoffMatrix::recommender());

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

// Draws p from `true_density`, y ~ Bernoulli(p), acts on the displayed score
// and averages the realized utility.
MonteCarloEstimate monte_carlo_eu(const ScoreDensity& true_density, const ScoreMap& displayed,
                                  const PayoffMatrix& payoff, double threshold,
                                  std::size_t samples, std::uint64_t seed);

enum class Convention {
  // P[D=0 | Y=1]: harm among those who would not reoffend.
  kPerOutcome,
  // P[D=0, Y=1]: harm averaged over every member of the group.
  kPerPerson,
};

std::string to_string(Convention c);
Convention parse_convention(const std::string& text);

struct GroupUtility {
  std::string group;
  double value = 0.0;
};

struct UtilityReport {
  std::vector<GroupUtility> groups;
  double disparity = 0.0;
  double tolerance = 0.0;
  bool verdict = false;
  std::map<std::string, CaseBreakdown> case_breakdown;

  double value(const std::string& group) const;
};

// Fills disparity (max pairwise absolute difference) and verdict.
UtilityReport make_utility_report(std::vector<GroupUtility> groups, double tolerance);

inline constexpr double kAnalyticParityTol = 1e-6;

UtilityReport judge_disutility(const PopulationModel& pop, const DecisionRule& rule,
                               Convention convention, double tolerance = kAnalyticParityTol);

struct Verdict {
  bool holds = false;
  double magnitude = 0.0;
};

// Equal average expected utility across groups, up to `tolerance`.
Verdict disparity_verdict(const UtilityReport& report, double tolerance);

}  // namespace fairness
