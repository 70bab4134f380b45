#include "fairness/decision_rules.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fairness/errors.hpp"
#include "fairness/format.hpp"

namespace fairness {

namespace {

// Thresholds are bisected well below the 1e-8 a score grid needs so that the
// rates they induce land within 1e-6 even on steep densities.
constexpr double kThresholdTol = 1e-12;
constexpr int kMaxBisections = 200;
constexpr double kRateTol = 1e-6;

// Smallest t in [lo, hi] with pred(t), given pred(hi) holds. Returns a point
// at which pred holds.
template <class Pred>
double first_true(double lo, double hi, Pred pred) {
  if (pred(lo)) return lo;
  for (int it = 0; it < kMaxBisections && hi - lo > kThresholdTol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// Largest t in [lo, hi] with pred(t), given pred(lo) holds.
template <class Pred>
double last_true(double lo, double hi, Pred pred) {
  if (pred(hi)) return hi;
  for (int it = 0; it < kMaxBisections && hi - lo > kThresholdTol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

bool same_bits(const std::optional<double>& a, const std::optional<double>& b) {
  return a.has_value() == b.has_value() && (!a || *a == *b);
}

struct RocCurve {
  const ConditionalScoreDensity& density;
  double m0;
  double m1;

  double fpr(double t) const { return density.f0().mass_above(t) / m0; }
  double tpr(double t) const { return density.f1().mass_above(t) / m1; }
};

// Nudges the continuous parameter of `policy` by a few ulps so that the
// measured FNR reproduces `reference_fnr` bit for bit when some nearby
// representable parameter does. Leaves the policy unchanged otherwise.
GroupPolicy polish_fnr(const ConditionalScoreDensity& density, GroupPolicy policy,
                       const std::optional<double>& reference_fnr) {
  if (!reference_fnr) return policy;
  auto fnr_of = [&](const GroupPolicy& p) { return rates(confusion(density, p)).fnr; };
  if (same_bits(fnr_of(policy), reference_fnr)) return policy;

  double* knob = nullptr;
  double lo = 0.0;
  double hi = 1.0;
  if (auto* r = std::get_if<Randomized>(&policy)) {
    knob = &r->mix;
  } else {
    knob = &std::get<Deterministic>(policy).threshold;
  }
  const double start = *knob;
  for (int step = 1; step <= 512; ++step) {
    for (double direction : {-1.0, 1.0}) {
      double x = start;
      for (int k = 0; k < step; ++k) x = std::nextafter(x, direction < 0 ? lo : hi);
      GroupPolicy candidate = policy;
      if (auto* r = std::get_if<Randomized>(&candidate)) {
        r->mix = x;
      } else {
        std::get<Deterministic>(candidate).threshold = x;
      }
      if (same_bits(fnr_of(candidate), reference_fnr)) return candidate;
    }
  }
  return policy;
}

}  // namespace

void validate(const GroupPolicy& policy) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (const auto* d = std::get_if<Deterministic>(&policy)) {
    if (!in_unit(d->threshold)) throw InvalidArgument("threshold must lie in [0,1]");
    return;
  }
  const auto& r = std::get<Randomized>(policy);
  if (!in_unit(r.lower) || !in_unit(r.upper)) {
    throw InvalidArgument("thresholds must lie in [0,1]");
  }
  if (r.lower > r.upper) throw InvalidArgument("lower threshold exceeds upper threshold");
  if (!in_unit(r.mix)) throw InvalidArgument("mix probability must lie in [0,1]");
}

double decide(const GroupPolicy& policy, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw InvalidArgument("score must lie in [0,1]");
  if (const auto* d = std::get_if<Deterministic>(&policy)) return s > d->threshold ? 1.0 : 0.0;
  const auto& r = std::get<Randomized>(policy);
  return r.mix * (s > r.lower ? 1.0 : 0.0) + (1.0 - r.mix) * (s > r.upper ? 1.0 : 0.0);
}

DecisionRule DecisionRule::shared_threshold(const std::vector<std::string>& labels,
                                            double threshold) {
  DecisionRule rule;
  for (const auto& label : labels) rule.set(label, Deterministic{threshold});
  return rule;
}

DecisionRule& DecisionRule::set(const std::string& label, GroupPolicy policy) {
  validate(policy);
  for (auto& [name, p] : policies_) {
    if (name == label) {
      p = policy;
      return *this;
    }
  }
  policies_.emplace_back(label, policy);
  return *this;
}

bool DecisionRule::covers(const std::string& label) const {
  return std::any_of(policies_.begin(), policies_.end(),
                     [&](const auto& entry) { return entry.first == label; });
}

const GroupPolicy& DecisionRule::policy(const std::string& label) const {
  for (const auto& [name, p] : policies_) {
    if (name == label) return p;
  }
  throw UnknownGroupError(label);
}

double decide(const DecisionRule& rule, const std::string& group, double s) {
  return decide(rule.policy(group), s);
}

RatePair rates(const ConfusionCounts& c) {
  RatePair out;
  if (c.fp + c.tn > 0.0) out.fpr = c.fp / (c.fp + c.tn);
  if (c.fn + c.tp > 0.0) out.fnr = c.fn / (c.fn + c.tp);
  return out;
}

double accepted_mass(const ScoreDensity& density, const GroupPolicy& policy) {
  if (const auto* d = std::get_if<Deterministic>(&policy)) return density.mass_above(d->threshold);
  const auto& r = std::get<Randomized>(policy);
  return r.mix * density.mass_above(r.lower) + (1.0 - r.mix) * density.mass_above(r.upper);
}

ConfusionCounts confusion(const ConditionalScoreDensity& density, const GroupPolicy& policy) {
  ConfusionCounts c;
  c.tp = accepted_mass(density.f1(), policy);
  c.fp = accepted_mass(density.f0(), policy);
  c.fn = std::max(0.0, density.f1().mass() - c.tp);
  c.tn = std::max(0.0, density.f0().mass() - c.fp);
  return c;
}

PopulationModel coarsen(const PopulationModel& pop, const DecisionRule& rule) {
  std::vector<Group> groups;
  for (const auto& g : pop.groups()) {
    const auto c = confusion(g.density, rule.policy(g.label));
    // Cell width is 1/2, so weights are twice the masses.
    ConditionalScoreDensity coarse(ScoreDensity({2.0 * c.tn, 2.0 * c.fp}),
                                   ScoreDensity({2.0 * c.fn, 2.0 * c.tp}));
    groups.push_back(Group{g.label, std::move(coarse), g.weight});
  }
  return PopulationModel(std::move(groups));
}

RocPoint roc_point(const ConditionalScoreDensity& density, const GroupPolicy& policy) {
  const auto r = rates(confusion(density, policy));
  if (!r.fpr || !r.fnr) throw InvalidArgument("ROC point undefined for a group without both classes");
  return RocPoint{*r.fpr, 1.0 - *r.fnr};
}

GroupPolicy solve_roc_target(const ConditionalScoreDensity& density, RocPoint target) {
  if (!(target.fpr >= 0.0 && target.fpr <= 1.0 && target.tpr >= 0.0 && target.tpr <= 1.0)) {
    throw InvalidArgument("ROC target must lie in the unit square");
  }
  const RocCurve roc{density, density.f0().mass(), density.f1().mass()};
  if (roc.m0 <= 0.0 || roc.m1 <= 0.0) {
    throw InvalidArgument("ROC undefined for a group without both classes");
  }
  if (target.fpr == 0.0 && target.tpr == 0.0) return Deterministic{1.0};
  if (target.fpr == 1.0 && target.tpr == 1.0) return Deterministic{0.0};

  const std::size_t n = density.grid_size();
  const double fpr_t = target.fpr;
  const double tpr_t = target.tpr;

  if (tpr_t >= fpr_t) {
    // Mix a threshold on the ray from (0,0) through the target with the
    // "never" threshold 1.
    auto h = [&](double t) { return roc.tpr(t) * fpr_t - tpr_t * roc.fpr(t); };
    const double t_fpr = first_true(0.0, 1.0, [&](double t) { return roc.fpr(t) <= fpr_t; });
    double t_pos = t_fpr;
    if (h(t_pos) < 0.0) {
      bool found = false;
      for (std::size_t k = std::min(n, static_cast<std::size_t>(t_fpr * n)) + 1; k-- > 0;) {
        const double t = static_cast<double>(k) / static_cast<double>(n);
        if (t <= t_fpr && h(t) >= 0.0) {
          t_pos = t;
          found = true;
          break;
        }
      }
      if (!found) {
        throw InfeasibleError("target (fpr=" + format_number(fpr_t) + ", tpr=" +
                              format_number(tpr_t) + ") lies above the group's ROC curve");
      }
    }
    const double t_root = h(0.0) >= 0.0 ? 0.0 : first_true(0.0, t_pos, [&](double t) { return h(t) >= 0.0; });
    const double q = std::clamp(tpr_t / roc.tpr(t_root), 0.0, 1.0);
    if (q == 1.0) return Deterministic{t_root};
    return Randomized{t_root, 1.0, q};
  }

  // Below the chance diagonal: mix with the "always" threshold 0 instead.
  auto h2 = [&](double t) {
    return (1.0 - roc.tpr(t)) * (1.0 - fpr_t) - (1.0 - tpr_t) * (1.0 - roc.fpr(t));
  };
  const double t_fpr = last_true(0.0, 1.0, [&](double t) { return roc.fpr(t) >= fpr_t; });
  double t_pos = t_fpr;
  if (h2(t_pos) < 0.0) {
    bool found = false;
    for (std::size_t k = static_cast<std::size_t>(std::ceil(t_fpr * n)); k <= n; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(n);
      if (t >= t_fpr && h2(t) >= 0.0) {
        t_pos = t;
        found = true;
        break;
      }
    }
    if (!found) {
      throw InfeasibleError("target (fpr=" + format_number(fpr_t) + ", tpr=" +
                            format_number(tpr_t) + ") lies below the group's ROC curve");
    }
  }
  const double t_root = last_true(t_pos, 1.0, [&](double t) { return h2(t) >= 0.0; });
  const double q = std::clamp(1.0 - (1.0 - tpr_t) / (1.0 - roc.tpr(t_root)), 0.0, 1.0);
  if (q == 0.0) return Deterministic{t_root};
  return Randomized{0.0, t_root, q};
}

DecisionRule solve_equalized_odds(const PopulationModel& pop, const std::string& reference,
                                  const GroupPolicy& reference_policy) {
  validate(reference_policy);
  const auto& ref = pop.group(reference).density;
  const auto ref_rates = rates(confusion(ref, reference_policy));
  if (!ref_rates.fpr || !ref_rates.fnr) {
    throw InvalidArgument("reference group '" + reference + "' needs both outcome classes");
  }
  const RocPoint target{*ref_rates.fpr, 1.0 - *ref_rates.fnr};

  DecisionRule rule;
  for (const auto& g : pop.groups()) {
    if (g.label == reference) {
      rule.set(g.label, reference_policy);
      continue;
    }
    const auto same = rates(confusion(g.density, reference_policy));
    if (same_bits(same.fpr, ref_rates.fpr) && same_bits(same.fnr, ref_rates.fnr)) {
      rule.set(g.label, reference_policy);
      continue;
    }
    GroupPolicy policy;
    try {
      policy = solve_roc_target(g.density, target);
    } catch (const InfeasibleError& e) {
      throw InfeasibleError("group '" + g.label + "': " + e.what());
    }
    policy = polish_fnr(g.density, policy, ref_rates.fnr);
    const auto got = rates(confusion(g.density, policy));
    if (!got.fpr || !got.fnr || std::abs(*got.fpr - *ref_rates.fpr) > kRateTol ||
        std::abs(*got.fnr - *ref_rates.fnr) > kRateTol) {
      throw Error("equalized-odds solver did not converge for group '" + g.label + "'");
    }
    rule.set(g.label, policy);
  }
  return rule;
}

Deterministic solve_parity_target(const ConditionalScoreDensity& density, double target_joint) {
  if (!std::isfinite(target_joint) || target_joint < 0.0) {
    throw InvalidArgument("target joint probability must be a nonnegative number");
  }
  const double positives = density.f1().mass();
  if (target_joint > positives + kThresholdTol) {
    throw InfeasibleError("target P[D=0,Y=1]=" + format_number(target_joint) +
                          " exceeds the group's base rate " + format_number(positives));
  }
  // P[D=0, Y=1] = mass of f1 at or below the threshold; nondecreasing in t.
  const double t = first_true(0.0, 1.0, [&](double x) {
    return density.f1().mass_below(x) >= std::min(target_joint, positives);
  });
  return Deterministic{t};
}

DecisionRule solve_parity_ratio(const PopulationModel& pop, const std::string& reference,
                                const GroupPolicy& reference_policy) {
  validate(reference_policy);
  const double target = confusion(pop.group(reference).density, reference_policy).fn;
  DecisionRule rule;
  for (const auto& g : pop.groups()) {
    if (g.label == reference) {
      rule.set(g.label, reference_policy);
      continue;
    }
    if (confusion(g.density, reference_policy).fn == target) {
      rule.set(g.label, reference_policy);
      continue;
    }
    try {
      rule.set(g.label, solve_parity_target(g.density, target));
    } catch (const InfeasibleError& e) {
      throw InfeasibleError("group '" + g.label + "': " + e.what());
    }
  }
  return rule;
}

std::string format_rule(const DecisionRule& rule) {
  std::string out;
  for (const auto& [label, policy] : rule.policies()) {
    out += "group=" + label;
    if (const auto* d = std::get_if<Deterministic>(&policy)) {
      out += " kind=det t1=" + format_exact(d->threshold);
    } else {
      const auto& r = std::get<Randomized>(policy);
      out += " kind=rand t1=" + format_exact(r.lower) + " t2=" + format_exact(r.upper) +
             " q=" + format_exact(r.mix);
    }
    out += '\n';
  }
  return out;
}

DecisionRule parse_rule(std::string_view text) {
  DecisionRule rule;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fail = [&](const std::string& why) {
      throw ParseError("rule line " + std::to_string(line_no) + ": " + why);
    };
    std::istringstream tokens(line);
    std::string token;
    std::string group, kind;
    std::optional<double> t1, t2, q;
    while (tokens >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) fail("expected key=value, got '" + token + "'");
      const std::string key = token.substr(0, eq);
      const std::string value = token.substr(eq + 1);
      auto number = [&]() {
        char* end = nullptr;
        const double v = std::strtod(value.c_str(), &end);
        if (value.empty() || *end != '\0') fail("bad number '" + value + "' for " + key);
        return v;
      };
      if (key == "group") {
        group = value;
      } else if (key == "kind") {
        kind = value;
      } else if (key == "t1") {
        t1 = number();
      } else if (key == "t2") {
        t2 = number();
      } else if (key == "q") {
        q = number();
      } else {
        fail("unknown key '" + key + "'");
      }
    }
    if (group.empty()) fail("missing group");
    if (!t1) fail("missing t1");
    try {
      if (kind == "det") {
        if (t2 || q) fail("deterministic policy takes only t1");
        rule.set(group, Deterministic{*t1});
      } else if (kind == "rand") {
        if (!t2 || !q) fail("randomized policy needs t2 and q");
        rule.set(group, Randomized{*t1, *t2, *q});
      } else {
        fail("kind must be det or rand");
      }
    } catch (const InvalidArgument& e) {
      fail(e.what());
    }
  }
  return rule;
}

}  // namespace fairness
