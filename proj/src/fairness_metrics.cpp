#include "fairness/fairness_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "fairness/errors.hpp"
#include "fairness/kernels.hpp"

namespace fairness {

namespace {

// Mass split by outcome and first moment of one bin of one group.
struct BinMass {
  double negatives = 0.0;
  double positives = 0.0;
  double moment = 0.0;

  double total() const { return negatives + positives; }
};

using BinSource = std::function<BinMass(std::size_t group, std::size_t bin)>;

double interval_moment(const ScoreDensity& d, double a, double b) {
  if (!(b > a)) return 0.0;
  double m = 0.0;
  for (std::size_t k = d.cell_of(a); k <= d.cell_of(b); ++k) {
    const double lo = std::max(a, d.cell_lower(k));
    const double hi = std::min(b, d.cell_upper(k));
    if (hi > lo) m += d.weight(k) * (hi * hi - lo * lo) * 0.5;
  }
  return m;
}

double interval_mass(const ScoreDensity& d, double a, double b) {
  return std::max(0.0, d.mass_below(b) - d.mass_below(a));
}

BinMass cell_mass(const ConditionalScoreDensity& d, std::size_t cell) {
  const double h = d.f0().cell_width();
  BinMass m;
  m.negatives = d.f0().weight(cell) * h;
  m.positives = d.f1().weight(cell) * h;
  m.moment = m.total() * d.f0().cell_midpoint(cell);
  return m;
}

BinMass interval_bin(const ConditionalScoreDensity& d, double a, double b) {
  BinMass m;
  m.negatives = interval_mass(d.f0(), a, b);
  m.positives = interval_mass(d.f1(), a, b);
  m.moment = interval_moment(d.f0(), a, b) + interval_moment(d.f1(), a, b);
  return m;
}

std::optional<double> ratio(double num, double den) {
  if (den > 0.0) return num / den;
  return std::nullopt;
}

CalibrationReport build_between(std::vector<std::string> groups, std::vector<double> shares,
                                std::size_t bins, const BinSource& source) {
  if (groups.size() < 2) throw InvalidArgument("calibration between groups needs two groups");
  CalibrationReport report;
  report.groups = std::move(groups);
  report.bins.resize(bins);

  double pooled_total = 0.0;
  std::vector<double> pooled_mass(bins, 0.0);
  for (std::size_t k = 0; k < bins; ++k) {
    CalibrationBin& bin = report.bins[k];
    bin.lower = static_cast<double>(k) / static_cast<double>(bins);
    bin.upper = static_cast<double>(k + 1) / static_cast<double>(bins);
    double pos = 0.0;
    double all = 0.0;
    double moment = 0.0;
    std::optional<double> lo_rate;
    std::optional<double> hi_rate;
    std::size_t defined = 0;
    for (std::size_t g = 0; g < report.groups.size(); ++g) {
      const BinMass m = source(g, k);
      pos += shares[g] * m.positives;
      all += shares[g] * m.total();
      moment += shares[g] * m.moment;
      const auto rate = ratio(m.positives, m.total());
      bin.group_rate.push_back(rate);
      if (rate) {
        ++defined;
        lo_rate = lo_rate ? std::min(*lo_rate, *rate) : *rate;
        hi_rate = hi_rate ? std::max(*hi_rate, *rate) : *rate;
      }
    }
    bin.pooled_rate = ratio(pos, all);
    bin.level = ratio(moment, all);
    if (defined >= 2) bin.gap = *hi_rate - *lo_rate;
    pooled_mass[k] = all;
    pooled_total += all;
  }

  double weighted = 0.0;
  double weight = 0.0;
  for (std::size_t k = 0; k < bins; ++k) {
    CalibrationBin& bin = report.bins[k];
    bin.mass = pooled_total > 0.0 ? pooled_mass[k] / pooled_total : 0.0;
    if (!bin.gap) continue;
    ++report.defined_bins;
    report.sup_gap = std::max(report.sup_gap, *bin.gap);
    weighted += bin.mass * *bin.gap;
    weight += bin.mass;
  }
  report.l1_gap = weight > 0.0 ? weighted / weight : 0.0;
  return report;
}

CalibrationErrorReport build_within(std::string group, std::size_t bins,
                                    const std::function<BinMass(std::size_t)>& source) {
  CalibrationErrorReport report;
  report.group = std::move(group);
  report.bins.resize(bins);
  double total = 0.0;
  for (std::size_t k = 0; k < bins; ++k) {
    CalibrationErrorBin& bin = report.bins[k];
    bin.lower = static_cast<double>(k) / static_cast<double>(bins);
    bin.upper = static_cast<double>(k + 1) / static_cast<double>(bins);
    const BinMass m = source(k);
    bin.rate = ratio(m.positives, m.total());
    bin.level = ratio(m.moment, m.total());
    if (bin.rate) bin.error = std::abs(*bin.rate - *bin.level);
    bin.mass = m.total();
    total += m.total();
  }
  double weighted = 0.0;
  double weight = 0.0;
  for (auto& bin : report.bins) {
    bin.mass = total > 0.0 ? bin.mass / total : 0.0;
    if (!bin.error) continue;
    report.sup_error = std::max(report.sup_error, *bin.error);
    weighted += bin.mass * *bin.error;
    weight += bin.mass;
  }
  report.l1_error = weight > 0.0 ? weighted / weight : 0.0;
  return report;
}

std::vector<double> shares_of(const PopulationModel& pop) {
  std::vector<double> s;
  for (std::size_t g = 0; g < pop.size(); ++g) s.push_back(pop.share(g));
  return s;
}

BinMass tally_bin(const kernels::BinTally& b) {
  BinMass m;
  m.positives = static_cast<double>(b.positives);
  m.negatives = static_cast<double>(b.count - b.positives);
  m.moment = b.score_sum;
  return m;
}

std::optional<double> abs_diff(const std::optional<double>& a, const std::optional<double>& b) {
  if (a && b) return std::abs(*a - *b);
  return std::nullopt;
}

// Max over pairs, undefined if any pair is undefined.
std::optional<double> max_defined(const std::vector<PairGaps>& pairs,
                                  std::optional<double> PairGaps::*member) {
  double m = 0.0;
  for (const auto& p : pairs) {
    if (!(p.*member)) return std::nullopt;
    m = std::max(m, *(p.*member));
  }
  return m;
}

std::optional<double> max_of(const std::optional<double>& a, const std::optional<double>& b) {
  if (a && b) return std::max(*a, *b);
  return std::nullopt;
}

template <class Stat>
std::vector<PairGaps> pairwise(const std::vector<std::string>& groups,
                               const std::vector<Stat>& stats,
                               std::optional<double> Stat::*first,
                               std::optional<double> Stat::*second) {
  std::vector<PairGaps> pairs;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      pairs.push_back(PairGaps{groups[i], groups[j], abs_diff(stats[i].*first, stats[j].*first),
                               abs_diff(stats[i].*second, stats[j].*second)});
    }
  }
  return pairs;
}

std::vector<ConfusionCounts> counts_for(const PopulationModel& pop, const DecisionRule& rule) {
  std::vector<ConfusionCounts> out;
  for (const auto& g : pop.groups()) out.push_back(confusion(g.density, rule.policy(g.label)));
  return out;
}

std::vector<ConfusionCounts> counts_for(const AuditDataset& data, const DecisionRule& rule) {
  std::vector<ConfusionCounts> out(data.labels().size());
  for (const auto& r : data.records()) {
    const double d = decide(rule, data.labels()[r.group], r.score);
    auto& c = out[r.group];
    if (r.outcome) {
      c.tp += d;
      c.fn += 1.0 - d;
    } else {
      c.fp += d;
      c.tn += 1.0 - d;
    }
  }
  return out;
}

std::vector<ConfusionCounts> counts_for(const AuditDataset& data) {
  const auto tally = kernels::tally_parallel(data, 1);
  std::vector<ConfusionCounts> out;
  for (std::size_t g = 0; g < tally.groups.size(); ++g) {
    const auto& t = tally.groups[g];
    if (t.undecided > 0) {
      throw InvalidArgument("group '" + data.labels()[g] + "' has records without a decision");
    }
    out.push_back(ConfusionCounts{static_cast<double>(t.decided[1][1]),
                                  static_cast<double>(t.decided[1][0]),
                                  static_cast<double>(t.decided[0][1]),
                                  static_cast<double>(t.decided[0][0])});
  }
  return out;
}

void require_two(std::size_t n) {
  if (n < 2) throw InvalidArgument("comparison needs at least two groups");
}

}  // namespace

ConfusionCounts confusion(const PopulationModel& pop, const DecisionRule& rule,
                          const std::string& group) {
  return confusion(pop.group(group).density, rule.policy(group));
}

ConfusionCounts confusion(const AuditDataset& data, const DecisionRule& rule,
                          const std::string& group) {
  const auto idx = data.index_of(group);
  rule.policy(group);
  ConfusionCounts c;
  for (const auto& r : data.records()) {
    if (r.group != idx) continue;
    const double d = decide(rule, group, r.score);
    if (r.outcome) {
      c.tp += d;
      c.fn += 1.0 - d;
    } else {
      c.fp += d;
      c.tn += 1.0 - d;
    }
  }
  return c;
}

ConfusionCounts confusion(const AuditDataset& data, const std::string& group) {
  const auto idx = data.index_of(group);
  ConfusionCounts c;
  for (const auto& r : data.records()) {
    if (r.group != idx) continue;
    if (!r.decision) throw InvalidArgument("record of group '" + group + "' has no decision");
    const bool d = *r.decision == 1;
    if (r.outcome) {
      (d ? c.tp : c.fn) += 1.0;
    } else {
      (d ? c.fp : c.tn) += 1.0;
    }
  }
  return c;
}

CalibrationReport between_group_calibration_gap(const PopulationModel& pop) {
  return build_between(pop.labels(), shares_of(pop), pop.grid_size(),
                       [&](std::size_t g, std::size_t cell) {
                         return cell_mass(pop.groups()[g].density, cell);
                       });
}

CalibrationReport between_group_calibration_gap(const PopulationModel& pop, std::size_t bins) {
  if (bins == 0) throw InvalidArgument("bin count must be at least 1");
  const double w = 1.0 / static_cast<double>(bins);
  return build_between(pop.labels(), shares_of(pop), bins, [&](std::size_t g, std::size_t k) {
    return interval_bin(pop.groups()[g].density, static_cast<double>(k) * w,
                        k + 1 == bins ? 1.0 : static_cast<double>(k + 1) * w);
  });
}

CalibrationReport between_group_calibration_gap(const AuditDataset& data, std::size_t bins) {
  require_two(data.labels().size());
  const auto tally = kernels::tally_parallel(data, bins);
  std::vector<double> shares(data.labels().size(), 1.0);
  return build_between(data.labels(), shares, bins, [&](std::size_t g, std::size_t k) {
    return tally_bin(tally.groups[g].bins[k]);
  });
}

CalibrationErrorReport within_group_calibration_error(const PopulationModel& pop,
                                                      const std::string& group) {
  const auto& d = pop.group(group).density;
  return build_within(group, d.grid_size(), [&](std::size_t cell) { return cell_mass(d, cell); });
}

CalibrationErrorReport within_group_calibration_error(const PopulationModel& pop,
                                                      const std::string& group,
                                                      std::size_t bins) {
  if (bins == 0) throw InvalidArgument("bin count must be at least 1");
  const auto& d = pop.group(group).density;
  const double w = 1.0 / static_cast<double>(bins);
  return build_within(group, bins, [&](std::size_t k) {
    return interval_bin(d, static_cast<double>(k) * w,
                        k + 1 == bins ? 1.0 : static_cast<double>(k + 1) * w);
  });
}

CalibrationErrorReport within_group_calibration_error(const AuditDataset& data,
                                                      const std::string& group,
                                                      std::size_t bins) {
  const auto idx = data.index_of(group);
  const auto tally = kernels::tally_parallel(data, bins);
  return build_within(group, bins,
                      [&](std::size_t k) { return tally_bin(tally.groups[idx].bins[k]); });
}

std::optional<double> SeparationReport::max_gap() const { return max_of(fpr_gap, fnr_gap); }

bool SeparationReport::holds(double tolerance) const {
  return fpr_gap && fnr_gap && *fpr_gap <= tolerance && *fnr_gap <= tolerance;
}

std::optional<double> SufficiencyReport::max_gap() const {
  return max_of(positive_gap, negative_gap);
}

bool SufficiencyReport::holds(double tolerance) const {
  return positive_gap && negative_gap && *positive_gap <= tolerance &&
         *negative_gap <= tolerance;
}

PredictiveValues predictive_values(const ConfusionCounts& c) {
  return PredictiveValues{ratio(c.tp, c.tp + c.fp), ratio(c.fn, c.fn + c.tn)};
}

SeparationReport separation_gap(const std::vector<std::string>& groups,
                                const std::vector<ConfusionCounts>& counts) {
  require_two(groups.size());
  SeparationReport report;
  report.groups = groups;
  for (const auto& c : counts) report.rates.push_back(rates(c));
  report.pairs = pairwise(groups, report.rates, &RatePair::fpr, &RatePair::fnr);
  report.fpr_gap = max_defined(report.pairs, &PairGaps::a);
  report.fnr_gap = max_defined(report.pairs, &PairGaps::b);
  return report;
}

SeparationReport separation_gap(const PopulationModel& pop, const DecisionRule& rule) {
  return separation_gap(pop.labels(), counts_for(pop, rule));
}

SeparationReport separation_gap(const AuditDataset& data, const DecisionRule& rule) {
  return separation_gap(data.labels(), counts_for(data, rule));
}

SeparationReport separation_gap(const AuditDataset& data) {
  return separation_gap(data.labels(), counts_for(data));
}

SufficiencyReport sufficiency_gap_binary(const std::vector<std::string>& groups,
                                         const std::vector<ConfusionCounts>& counts) {
  require_two(groups.size());
  SufficiencyReport report;
  report.groups = groups;
  for (const auto& c : counts) report.values.push_back(predictive_values(c));
  report.pairs = pairwise(groups, report.values, &PredictiveValues::given_positive,
                          &PredictiveValues::given_negative);
  report.positive_gap = max_defined(report.pairs, &PairGaps::a);
  report.negative_gap = max_defined(report.pairs, &PairGaps::b);
  return report;
}

SufficiencyReport sufficiency_gap_binary(const PopulationModel& pop, const DecisionRule& rule) {
  return sufficiency_gap_binary(pop.labels(), counts_for(pop, rule));
}

SufficiencyReport sufficiency_gap_binary(const AuditDataset& data, const DecisionRule& rule) {
  return sufficiency_gap_binary(data.labels(), counts_for(data, rule));
}

SufficiencyReport sufficiency_gap_binary(const AuditDataset& data) {
  return sufficiency_gap_binary(data.labels(), counts_for(data));
}

ImpossibilityWitness impossibility_witness(const PopulationModel& pop, const DecisionRule& rule,
                                           double epsilon) {
  const auto counts = counts_for(pop, rule);
  std::vector<double> base_rates;
  for (const auto& g : pop.groups()) base_rates.push_back(g.density.base_rate());
  const auto [lo, hi] = std::minmax_element(base_rates.begin(), base_rates.end());
  ImpossibilityWitness w;
  w.base_rate_gap = *hi - *lo;
  if (!(w.base_rate_gap > kImperfectTol)) {
    throw InvalidArgument("base rates are equal; the impossibility result does not apply");
  }

  bool imperfect = false;
  for (const auto& c : counts) {
    const auto r = rates(c);
    if (!r.fpr || !r.fnr) throw InvalidArgument("every group needs both outcome classes");
    const double err = *r.fpr + *r.fnr;
    if (err > kImperfectTol && err < 2.0 - kImperfectTol) imperfect = true;
  }
  if (!imperfect) {
    throw InvalidArgument("rule is perfectly accurate (or perfectly inverted) in every group");
  }

  const auto sep = separation_gap(pop.labels(), counts);
  const auto suf = sufficiency_gap_binary(pop.labels(), counts);
  w.separation_gap = sep.max_gap().value_or(0.0);
  w.sufficiency_gap = suf.max_gap().value_or(0.0);
  w.separation_holds = sep.holds(epsilon);
  w.sufficiency_holds = suf.holds(epsilon);

  // Predictive values every group would have at the first group's rates.
  const auto ref = rates(counts.front());
  const double fpr = *ref.fpr;
  const double tpr = 1.0 - *ref.fnr;
  std::vector<ConfusionCounts> implied;
  for (double p : base_rates) {
    implied.push_back(ConfusionCounts{tpr * p, fpr * (1.0 - p), (1.0 - tpr) * p,
                                      (1.0 - fpr) * (1.0 - p)});
  }
  w.implied_sufficiency_gap =
      sufficiency_gap_binary(pop.labels(), implied).max_gap().value_or(0.0);

  w.consistent = !(w.separation_holds && w.sufficiency_holds);
  if (w.separation_holds && !(w.sufficiency_gap > 0.5 * w.implied_sufficiency_gap)) {
    w.consistent = false;
  }
  return w;
}

}  // namespace fairness
