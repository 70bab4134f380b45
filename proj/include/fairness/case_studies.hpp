#pragma once

// Runnable experiments: a miscalibrated recommender, equal error rates with
// unequal harm, the equalized-odds judge, and the construction showing that
// equal expected harm does not require equal P[Y=1 | D=0] across groups.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fairness/decision_rules.hpp"
#include "fairness/report.hpp"
#include "fairness/score_model.hpp"
#include "fairness/utility_analysis.hpp"

namespace fairness {

inline constexpr std::size_t kDefaultSamples = 1'000'000;
inline constexpr std::uint64_t kDefaultSeed = 42;

inline const std::string kMen = "men";
inline const std::string kWomen = "women";

// Named score maps: identity, flip (1-p), constant:<v>, shift:<d> (clamped
// p+d), power:<k> (p^k), stretch:<k> (pushes p away from or toward 1/2 while
// keeping the side of 1/2).
ScoreMap parse_score_map(const std::string& spec, std::size_t grid_size);

// Women see calibrated scores, men see `men_map`; both act iff the displayed
// score exceeds 1/2 and true probabilities are uniform.
ExperimentReport run_recommender_experiment(const ScoreMap& men_map,
                                            std::size_t grid_size = kDefaultGridSize,
                                            std::size_t mc_samples = kDefaultSamples,
                                            std::uint64_t seed = kDefaultSeed);

// Only false positives occur, with equal mass in both groups, concentrated at
// true probabilities p_men and p_women.
ExperimentReport run_equal_rates_unequal_utility(double p_men, double p_women, double fp_mass);

// Calibrated groups with the given base rates.
PopulationModel judge_population(double base_rate_men, double base_rate_women,
                                 std::size_t grid_size = kDefaultGridSize);

// Equalized-odds rule with the women deciding at `reference_threshold`; when
// that operating point is unreachable for the men, the men decide there and
// the women are randomized instead.
DecisionRule judge_rule(const PopulationModel& pop, double reference_threshold);

ExperimentReport run_judge_experiment(double base_rate_men, double base_rate_women,
                                      double reference_threshold, Convention convention,
                                      std::size_t grid_size = kDefaultGridSize);

struct AppendixSetup {
  PopulationModel population;
  DecisionRule rule;
  double men_threshold = 0.0;
  double women_threshold = 0.5;
};

// Calibrated men (base rate 0.3) and women (base rate 0.6); women decide at
// 1/2 and the men's threshold equalizes P[D=0, Y=1].
AppendixSetup appendix_setup(std::size_t grid_size = kDefaultGridSize);

// Two triangular bumps centred at `low` and `high` with the same mass and
// first moment as `f0`. Throws InvalidArgument when no such mix exists.
ScoreDensity bimodal_reshape(const ScoreDensity& f0, double low, double high,
                             double half_width);

struct ReshapeComparison {
  double eq_star_gap_a = 0.0;  // |P_m[D=0,Y=1] - P_f[D=0,Y=1]| on A
  double eq_star_gap_b = 0.0;
  double x_a_men = 0.0;  // P_m[Y=1 | D=0] on A
  double x_b_men = 0.0;
  double x_women = 0.0;  // same on A and B
  double eq_double_star_gap_a = 0.0;  // |x_men - x_women|
  double eq_double_star_gap_b = 0.0;
  double shifted_mass = 0.0;  // change of men's Y=0 mass above the threshold
};

// Replaces the men's Y=0 density by `reshaped_f0` (same mass and mean,
// checked) and compares both populations under the same rule.
ReshapeComparison compare_reshape(const PopulationModel& a, const ScoreDensity& reshaped_f0,
                                  const DecisionRule& rule);

ExperimentReport run_appendix_counterexample(std::size_t grid_size = kDefaultGridSize,
                                             std::size_t reshapes = 100,
                                             std::uint64_t seed = kDefaultSeed);

// Random calibrated two-group populations with base rates at least 0.05
// apart, equalized-odds rules, and the impossibility witness for each.
ExperimentReport run_impossibility_sweep(std::size_t populations = 500,
                                         std::size_t grid_size = 256,
                                         std::uint64_t seed = kDefaultSeed);

// Experiment ids accepted by the CLI.
std::vector<std::string> experiment_ids();

}  // namespace fairness
