#pragma once

// Group fairness criteria on analytic populations and on audit datasets:
// calibration between and within groups, separation (equal FPR/FNR) and
// sufficiency of a binary prediction.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fairness/audit_dataset.hpp"
#include "fairness/decision_rules.hpp"
#include "fairness/score_model.hpp"

namespace fairness {

inline constexpr std::size_t kDefaultBins = 10;

ConfusionCounts confusion(const PopulationModel& pop, const DecisionRule& rule,
                          const std::string& group);
// Each record contributes decide(rule, group, score); exact counts for
// deterministic rules.
ConfusionCounts confusion(const AuditDataset& data, const DecisionRule& rule,
                          const std::string& group);
// Uses the recorded decisions. Throws InvalidArgument if one is missing.
ConfusionCounts confusion(const AuditDataset& data, const std::string& group);

struct CalibrationBin {
  double lower = 0.0;
  double upper = 0.0;
  // Mean score of the mass in the bin.
  std::optional<double> level;
  // P(Y=1 | bin, A=a) per group, in report group order.
  std::vector<std::optional<double>> group_rate;
  std::optional<double> pooled_rate;
  // Largest pairwise difference of the defined group rates; needs two.
  std::optional<double> gap;
  // Share of the pooled mass that falls in the bin.
  double mass = 0.0;
};

struct CalibrationReport {
  std::vector<std::string> groups;
  std::vector<CalibrationBin> bins;
  double sup_gap = 0.0;
  // Mass-weighted mean gap over bins where the gap is defined.
  double l1_gap = 0.0;
  std::size_t defined_bins = 0;

  bool sufficiency_holds(double tolerance = 0.0) const { return sup_gap <= tolerance; }
};

// Analytic: one bin per grid cell, pooled with the population group weights.
CalibrationReport between_group_calibration_gap(const PopulationModel& pop);
// Analytic, aggregated exactly into `bins` equal-width bins.
CalibrationReport between_group_calibration_gap(const PopulationModel& pop, std::size_t bins);
CalibrationReport between_group_calibration_gap(const AuditDataset& data,
                                                std::size_t bins = kDefaultBins);

struct CalibrationErrorBin {
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> level;
  std::optional<double> rate;
  // |rate - level|.
  std::optional<double> error;
  // Share of the group's mass in the bin.
  double mass = 0.0;
};

struct CalibrationErrorReport {
  std::string group;
  std::vector<CalibrationErrorBin> bins;
  double sup_error = 0.0;
  double l1_error = 0.0;
};

CalibrationErrorReport within_group_calibration_error(const PopulationModel& pop,
                                                      const std::string& group);
CalibrationErrorReport within_group_calibration_error(const PopulationModel& pop,
                                                      const std::string& group,
                                                      std::size_t bins);
CalibrationErrorReport within_group_calibration_error(const AuditDataset& data,
                                                      const std::string& group,
                                                      std::size_t bins = kDefaultBins);

// Gaps of two per-group statistics for one pair of groups.
struct PairGaps {
  std::string first;
  std::string second;
  std::optional<double> a;
  std::optional<double> b;
};

struct SeparationReport {
  std::vector<std::string> groups;
  std::vector<RatePair> rates;
  // a = |FPR difference|, b = |FNR difference|.
  std::vector<PairGaps> pairs;
  // Maxima over pairs; nullopt as soon as one pair is undefined.
  std::optional<double> fpr_gap;
  std::optional<double> fnr_gap;

  // Undefined unless both gaps are defined.
  std::optional<double> max_gap() const;
  bool holds(double tolerance) const;
};

struct PredictiveValues {
  // P(Y=1 | R=1) and P(Y=1 | R=0).
  std::optional<double> given_positive;
  std::optional<double> given_negative;
};

PredictiveValues predictive_values(const ConfusionCounts& counts);

struct SufficiencyReport {
  std::vector<std::string> groups;
  std::vector<PredictiveValues> values;
  std::vector<PairGaps> pairs;
  std::optional<double> positive_gap;
  std::optional<double> negative_gap;

  // Undefined unless both gaps are defined.
  std::optional<double> max_gap() const;
  bool holds(double tolerance) const;
};

SeparationReport separation_gap(const std::vector<std::string>& groups,
                                const std::vector<ConfusionCounts>& counts);
SeparationReport separation_gap(const PopulationModel& pop, const DecisionRule& rule);
SeparationReport separation_gap(const AuditDataset& data, const DecisionRule& rule);
SeparationReport separation_gap(const AuditDataset& data);

SufficiencyReport sufficiency_gap_binary(const std::vector<std::string>& groups,
                                         const std::vector<ConfusionCounts>& counts);
SufficiencyReport sufficiency_gap_binary(const PopulationModel& pop, const DecisionRule& rule);
SufficiencyReport sufficiency_gap_binary(const AuditDataset& data, const DecisionRule& rule);
SufficiencyReport sufficiency_gap_binary(const AuditDataset& data);

inline constexpr double kSeparationTol = 1e-6;
inline constexpr double kImperfectTol = 1e-6;

struct ImpossibilityWitness {
  double base_rate_gap = 0.0;
  double separation_gap = 0.0;
  double sufficiency_gap = 0.0;
  // Sufficiency gap that exact separation at the first group's rates would
  // force; strictly positive under the preconditions.
  double implied_sufficiency_gap = 0.0;
  bool separation_holds = false;
  bool sufficiency_holds = false;
  // False only if both criteria hold at once, which would contradict the
  // impossibility result.
  bool consistent = true;
};

// Throws InvalidArgument when the theorem's preconditions fail: fewer than
// two groups, equal base rates, or a perfect (or perfectly inverted) rule.
ImpossibilityWitness impossibility_witness(const PopulationModel& pop, const DecisionRule& rule,
                                           double epsilon = kSeparationTol);

}  // namespace fairness
