#pragma once

// Per-group score densities over [0,1] and the population model built on them.
//
// Densities are piecewise constant on a uniform grid. Cell i covers
// [i*h, (i+1)*h) with h = 1/grid_size; the weight of a cell is the density
// value on it, so the probability mass of the cell is weight*h.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fairness {

inline constexpr std::size_t kDefaultGridSize = 1024;

// Tolerance for identities that hold algebraically (mass totals, parity).
inline constexpr double kAlgebraicTol = 1e-9;

class ScoreDensity {
 public:
  explicit ScoreDensity(std::vector<double> weights);

  static ScoreDensity zero(std::size_t grid_size);
  static ScoreDensity uniform(std::size_t grid_size);
  // Samples `density` at the cell midpoints.
  static ScoreDensity from_function(std::size_t grid_size,
                                    const std::function<double(double)>& density);

  std::size_t grid_size() const { return weights_.size(); }
  double cell_width() const { return 1.0 / static_cast<double>(weights_.size()); }
  double cell_lower(std::size_t i) const;
  double cell_upper(std::size_t i) const;
  double cell_midpoint(std::size_t i) const;
  // Index of the cell containing s; s == 1 maps to the last cell.
  std::size_t cell_of(double s) const;

  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }
  double cell_mass(std::size_t i) const { return weights_[i] * cell_width(); }

  double mass() const;
  // Exact mass of {s > t} and {s <= t}; cells straddling t are split
  // proportionally, so both are continuous piecewise-linear functions of t.
  double mass_above(double t) const;
  double mass_below(double t) const;
  // Exact first moment, integral of s*f(s).
  double first_moment() const;

  ScoreDensity scaled(double factor) const;

 private:
  std::vector<double> weights_;
};

// Midpoint-rule quadrature of weight(s)*d(s) over [0,1].
double integrate(const ScoreDensity& d, const std::function<double(double)>& weight);

// Joint law of (S, Y) for one group: f0 carries the Y=0 mass, f1 the Y=1 mass,
// and together they integrate to one.
class ConditionalScoreDensity {
 public:
  ConditionalScoreDensity(ScoreDensity f0, ScoreDensity f1);

  // f1 = s*f, f0 = (1-s)*f at cell midpoints; `f` must integrate to one.
  static ConditionalScoreDensity calibrated(const ScoreDensity& f);
  // Calibrated group whose score density is an exponential tilt of the
  // uniform density, tuned so the base rate equals `base_rate` exactly.
  static ConditionalScoreDensity calibrated_with_base_rate(std::size_t grid_size,
                                                           double base_rate);

  const ScoreDensity& f0() const { return f0_; }
  const ScoreDensity& f1() const { return f1_; }
  std::size_t grid_size() const { return f0_.grid_size(); }
  double base_rate() const { return f1_.mass(); }
  // f0 + f1.
  ScoreDensity marginal() const;

 private:
  ScoreDensity f0_;
  ScoreDensity f1_;
};

struct Group {
  std::string label;
  ConditionalScoreDensity density;
  // Relative group size, used only when sampling or pooling across groups.
  double weight = 1.0;
};

class PopulationModel {
 public:
  explicit PopulationModel(std::vector<Group> groups);

  std::size_t size() const { return groups_.size(); }
  std::size_t grid_size() const { return groups_.front().density.grid_size(); }
  const std::vector<Group>& groups() const { return groups_; }
  const Group& group(const std::string& label) const;
  std::size_t index_of(const std::string& label) const;
  std::vector<std::string> labels() const;
  // Group weight divided by the sum of all weights.
  double share(std::size_t index) const;

  PopulationModel with_density(const std::string& label,
                               ConditionalScoreDensity density) const;

 private:
  std::vector<Group> groups_;
};

// A transformation from true probability to displayed score, held as one
// output value per grid cell (the image of the cell midpoint).
class ScoreMap {
 public:
  explicit ScoreMap(std::vector<double> values);

  static ScoreMap identity(std::size_t grid_size);
  static ScoreMap constant(std::size_t grid_size, double value);
  static ScoreMap from_function(std::size_t grid_size,
                                const std::function<double(double)>& map);

  std::size_t grid_size() const { return values_.size(); }
  double at(std::size_t cell) const { return values_[cell]; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> values_;
};

double base_rate(const PopulationModel& pop, const std::string& group);

// P(Y=1 | S in cell) per cell; nullopt where the cell carries no mass.
std::vector<std::optional<double>> calibration_curve(const PopulationModel& pop,
                                                     const std::string& group);

// Moves the mass of each cell of `group` to the cell containing its mapped
// score. Per-class mass is conserved.
PopulationModel apply_score_map(const PopulationModel& pop, const std::string& group,
                                const ScoreMap& map);

}  // namespace fairness
