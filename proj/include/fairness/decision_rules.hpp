#pragma once

// Threshold decision policies and the solvers that equalize error rates or
// expected harm across groups.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "fairness/score_model.hpp"

namespace fairness {

// Decide 1 iff s > threshold.
struct Deterministic {
  double threshold = 0.5;
};

// With probability `mix` apply the lower threshold, otherwise the upper one.
struct Randomized {
  double lower = 0.0;
  double upper = 1.0;
  double mix = 0.0;
};

using GroupPolicy = std::variant<Deterministic, Randomized>;

void validate(const GroupPolicy& policy);

// Probability of deciding 1 at score s. Never samples.
double decide(const GroupPolicy& policy, double s);

class DecisionRule {
 public:
  DecisionRule() = default;

  static DecisionRule shared_threshold(const std::vector<std::string>& labels,
                                       double threshold);

  // Inserts or replaces the policy of `label`; keeps first-insertion order.
  DecisionRule& set(const std::string& label, GroupPolicy policy);
  bool covers(const std::string& label) const;
  // Throws UnknownGroupError if the rule has no policy for `label`.
  const GroupPolicy& policy(const std::string& label) const;
  const std::vector<std::pair<std::string, GroupPolicy>>& policies() const {
    return policies_;
  }

 private:
  std::vector<std::pair<std::string, GroupPolicy>> policies_;
};

double decide(const DecisionRule& rule, const std::string& group, double s);

// Confusion-matrix cells. Positive class is Y=1 and decision 1. Cells are
// counts for datasets and probability masses for analytic populations.
struct ConfusionCounts {
  double tp = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  double tn = 0.0;

  double total() const { return tp + fp + fn + tn; }
};

// FPR = fp/(fp+tn), FNR = fn/(fn+tp); nullopt on a zero denominator.
struct RatePair {
  std::optional<double> fpr;
  std::optional<double> fnr;
};

RatePair rates(const ConfusionCounts& counts);

// Exact analytic confusion masses of one group under one policy.
ConfusionCounts confusion(const ConditionalScoreDensity& density, const GroupPolicy& policy);

// Integral of f(s) * decide(policy, s).
double accepted_mass(const ScoreDensity& density, const GroupPolicy& policy);

// Two-cell population: cell 0 holds R=0, cell 1 holds R=1.
PopulationModel coarsen(const PopulationModel& pop, const DecisionRule& rule);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

RocPoint roc_point(const ConditionalScoreDensity& density, const GroupPolicy& policy);

// Every non-reference group gets a policy whose FPR and FNR match those of the
// reference group under `reference_policy`. Throws InfeasibleError when a
// group cannot reach the reference operating point.
DecisionRule solve_equalized_odds(const PopulationModel& pop, const std::string& reference,
                                  const GroupPolicy& reference_policy);

// Policy for one group that reaches the ROC point `target`.
GroupPolicy solve_roc_target(const ConditionalScoreDensity& density, RocPoint target);

// Every non-reference group gets a deterministic threshold with the same
// joint probability P[D=0, Y=1] as the reference group.
DecisionRule solve_parity_ratio(const PopulationModel& pop, const std::string& reference,
                                const GroupPolicy& reference_policy);

// Deterministic threshold whose P[D=0, Y=1] equals `target_joint`. Throws
// InfeasibleError when the target exceeds the group's base rate.
Deterministic solve_parity_target(const ConditionalScoreDensity& density, double target_joint);

// `group=<label> kind=<det|rand> t1=<v> [t2=<v> q=<v>]`, one line per group.
std::string format_rule(const DecisionRule& rule);
DecisionRule parse_rule(std::string_view text);

}  // namespace fairness
