#include "fairness/score_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fairness/errors.hpp"

namespace fairness {

namespace {

void require_same_grid(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": grid sizes differ (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

ScoreDensity::ScoreDensity(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw InvalidArgument("score density needs at least one cell");
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidArgument("score density weights must be finite and nonnegative");
    }
  }
}

ScoreDensity ScoreDensity::zero(std::size_t grid_size) {
  return ScoreDensity(std::vector<double>(grid_size, 0.0));
}

ScoreDensity ScoreDensity::uniform(std::size_t grid_size) {
  return ScoreDensity(std::vector<double>(grid_size, 1.0));
}

ScoreDensity ScoreDensity::from_function(std::size_t grid_size,
                                         const std::function<double(double)>& density) {
  std::vector<double> w(grid_size);
  const double h = 1.0 / static_cast<double>(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    w[i] = density((static_cast<double>(i) + 0.5) * h);
  }
  return ScoreDensity(std::move(w));
}

double ScoreDensity::cell_lower(std::size_t i) const {
  return static_cast<double>(i) / static_cast<double>(weights_.size());
}

double ScoreDensity::cell_upper(std::size_t i) const {
  return static_cast<double>(i + 1) / static_cast<double>(weights_.size());
}

double ScoreDensity::cell_midpoint(std::size_t i) const {
  return (static_cast<double>(i) + 0.5) / static_cast<double>(weights_.size());
}

std::size_t ScoreDensity::cell_of(double s) const {
  if (!(s > 0.0)) return 0;
  const auto n = weights_.size();
  const auto idx = static_cast<std::size_t>(s * static_cast<double>(n));
  return std::min(idx, n - 1);
}

double ScoreDensity::mass() const {
  double total = 0.0;
  for (double w : weights_) total += w;
  return total * cell_width();
}

double ScoreDensity::mass_above(double t) const {
  if (t < 0.0) return mass();
  if (t >= 1.0) return 0.0;
  const std::size_t k = cell_of(t);
  double full = 0.0;
  for (std::size_t i = k + 1; i < weights_.size(); ++i) full += weights_[i];
  return full * cell_width() + weights_[k] * (cell_upper(k) - t);
}

double ScoreDensity::mass_below(double t) const {
  if (t < 0.0) return 0.0;
  if (t >= 1.0) return mass();
  const std::size_t k = cell_of(t);
  double full = 0.0;
  for (std::size_t i = 0; i < k; ++i) full += weights_[i];
  return full * cell_width() + weights_[k] * (t - cell_lower(k));
}

double ScoreDensity::first_moment() const {
  double total = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) total += weights_[i] * cell_midpoint(i);
  return total * cell_width();
}

ScoreDensity ScoreDensity::scaled(double factor) const {
  std::vector<double> w(weights_);
  for (double& x : w) x *= factor;
  return ScoreDensity(std::move(w));
}

double integrate(const ScoreDensity& d, const std::function<double(double)>& weight) {
  double total = 0.0;
  for (std::size_t i = 0; i < d.grid_size(); ++i) {
    if (d.weight(i) == 0.0) continue;
    total += d.weight(i) * weight(d.cell_midpoint(i));
  }
  return total * d.cell_width();
}

ConditionalScoreDensity::ConditionalScoreDensity(ScoreDensity f0, ScoreDensity f1)
    : f0_(std::move(f0)), f1_(std::move(f1)) {
  require_same_grid(f0_.grid_size(), f1_.grid_size(), "conditional score density");
  const double total = f0_.mass() + f1_.mass();
  if (std::abs(total - 1.0) > kAlgebraicTol) {
    throw InvalidArgument("conditional score density must have total mass 1, got " +
                          std::to_string(total));
  }
}

ConditionalScoreDensity ConditionalScoreDensity::calibrated(const ScoreDensity& f) {
  std::vector<double> w0(f.grid_size());
  std::vector<double> w1(f.grid_size());
  for (std::size_t i = 0; i < f.grid_size(); ++i) {
    const double s = f.cell_midpoint(i);
    w1[i] = s * f.weight(i);
    w0[i] = (1.0 - s) * f.weight(i);
  }
  return ConditionalScoreDensity(ScoreDensity(std::move(w0)), ScoreDensity(std::move(w1)));
}

ConditionalScoreDensity ConditionalScoreDensity::calibrated_with_base_rate(
    std::size_t grid_size, double base_rate) {
  if (grid_size == 0) throw InvalidArgument("grid size must be positive");
  const double h = 1.0 / static_cast<double>(grid_size);

  // Weights proportional to exp(lambda*(s - 1/2)); the mean score of the
  // tilted density is increasing in lambda.
  auto tilted = [&](double lambda) {
    std::vector<double> w(grid_size);
    double max_log = -INFINITY;
    for (std::size_t i = 0; i < grid_size; ++i) {
      w[i] = lambda * ((static_cast<double>(i) + 0.5) * h - 0.5);
      max_log = std::max(max_log, w[i]);
    }
    double total = 0.0;
    for (double& x : w) {
      x = std::exp(x - max_log);
      total += x;
    }
    for (double& x : w) x /= total * h;
    return w;
  };
  auto mean_of = [&](const std::vector<double>& w) {
    double m = 0.0;
    for (std::size_t i = 0; i < grid_size; ++i) m += w[i] * (static_cast<double>(i) + 0.5);
    return m * h * h;
  };

  double lo = -4000.0;
  double hi = 4000.0;
  if (!(base_rate > mean_of(tilted(lo)) && base_rate < mean_of(tilted(hi)))) {
    throw InvalidArgument("base rate " + std::to_string(base_rate) +
                          " is not reachable on a grid of " + std::to_string(grid_size));
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mean_of(tilted(mid)) < base_rate) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return calibrated(ScoreDensity(tilted(0.5 * (lo + hi))));
}

ScoreDensity ConditionalScoreDensity::marginal() const {
  std::vector<double> w(f0_.grid_size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = f0_.weight(i) + f1_.weight(i);
  return ScoreDensity(std::move(w));
}

PopulationModel::PopulationModel(std::vector<Group> groups) : groups_(std::move(groups)) {
  if (groups_.size() < 2) throw InvalidArgument("a population needs at least two groups");
  std::set<std::string> seen;
  for (const auto& g : groups_) {
    if (!seen.insert(g.label).second) {
      throw InvalidArgument("duplicate group label '" + g.label + "'");
    }
    if (!std::isfinite(g.weight) || g.weight <= 0.0) {
      throw InvalidArgument("group weight must be positive for '" + g.label + "'");
    }
    require_same_grid(groups_.front().density.grid_size(), g.density.grid_size(),
                      "population");
  }
}

const Group& PopulationModel::group(const std::string& label) const {
  return groups_[index_of(label)];
}

std::size_t PopulationModel::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (groups_[i].label == label) return i;
  }
  throw UnknownGroupError(label);
}

std::vector<std::string> PopulationModel::labels() const {
  std::vector<std::string> out;
  out.reserve(groups_.size());
  for (const auto& g : groups_) out.push_back(g.label);
  return out;
}

double PopulationModel::share(std::size_t index) const {
  double total = 0.0;
  for (const auto& g : groups_) total += g.weight;
  return groups_.at(index).weight / total;
}

PopulationModel PopulationModel::with_density(const std::string& label,
                                              ConditionalScoreDensity density) const {
  auto groups = groups_;
  groups[index_of(label)].density = std::move(density);
  return PopulationModel(std::move(groups));
}

ScoreMap::ScoreMap(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidArgument("score map needs at least one cell");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgument("score map output " + std::to_string(v) + " at cell " +
                            std::to_string(i) + " is outside [0,1]");
    }
  }
}

ScoreMap ScoreMap::identity(std::size_t grid_size) {
  return from_function(grid_size, [](double p) { return p; });
}

ScoreMap ScoreMap::constant(std::size_t grid_size, double value) {
  return ScoreMap(std::vector<double>(grid_size, value));
}

ScoreMap ScoreMap::from_function(std::size_t grid_size,
                                 const std::function<double(double)>& map) {
  std::vector<double> v(grid_size);
  const double h = 1.0 / static_cast<double>(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) v[i] = map((static_cast<double>(i) + 0.5) * h);
  return ScoreMap(std::move(v));
}

double base_rate(const PopulationModel& pop, const std::string& group) {
  return pop.group(group).density.base_rate();
}

std::vector<std::optional<double>> calibration_curve(const PopulationModel& pop,
                                                     const std::string& group) {
  const auto& d = pop.group(group).density;
  std::vector<std::optional<double>> curve(d.grid_size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double total = d.f0().weight(i) + d.f1().weight(i);
    if (total > 0.0) curve[i] = d.f1().weight(i) / total;
  }
  return curve;
}

PopulationModel apply_score_map(const PopulationModel& pop, const std::string& group,
                                const ScoreMap& map) {
  const auto& d = pop.group(group).density;
  require_same_grid(d.grid_size(), map.grid_size(), "score map");
  std::vector<double> w0(d.grid_size(), 0.0);
  std::vector<double> w1(d.grid_size(), 0.0);
  for (std::size_t i = 0; i < d.grid_size(); ++i) {
    const std::size_t j = d.f0().cell_of(map.at(i));
    w0[j] += d.f0().weight(i);
    w1[j] += d.f1().weight(i);
  }
  return pop.with_density(group, ConditionalScoreDensity(ScoreDensity(std::move(w0)),
                                                         ScoreDensity(std::move(w1))));
}

}  // namespace fairness
