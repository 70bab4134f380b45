#include <doctest.h>

#include <cmath>

#include "fairness/errors.hpp"
#include "fairness/score_model.hpp"

using namespace fairness;

namespace {

// Brute-force integral of a piecewise-constant density over [a, b].
double brute_mass(const ScoreDensity& d, double a, double b) {
  const std::size_t steps = 200000;
  const double h = (b - a) / steps;
  double sum = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double s = a + (k + 0.5) * h;
    sum += d.weight(d.cell_of(s)) * h;
  }
  return sum;
}

}  // namespace

TEST_CASE("uniform density has unit mass and closed-form tails") {
  const auto u = ScoreDensity::uniform(1024);
  CHECK(u.mass() == doctest::Approx(1.0).epsilon(1e-15));
  for (double t : {0.0, 0.1, 0.3333, 0.5, 0.77, 1.0}) {
    CHECK(u.mass_above(t) == doctest::Approx(1.0 - t).epsilon(1e-12));
    CHECK(u.mass_below(t) == doctest::Approx(t).epsilon(1e-12));
  }
  CHECK(u.first_moment() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("linear density integrates exactly at cell boundaries") {
  const std::size_t n = 64;
  const auto d = ScoreDensity::from_function(n, [](double s) { return 2.0 * s; });
  CHECK(d.mass() == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t i = 0; i <= n; i += 8) {
    const double t = static_cast<double>(i) / n;
    CHECK(d.mass_above(t) == doctest::Approx(1.0 - t * t).epsilon(1e-12));
  }
  // Between boundaries the step density is integrated exactly.
  for (double t : {0.013, 0.4071, 0.9})
    CHECK(d.mass_above(t) == doctest::Approx(1.0 - brute_mass(d, 0.0, t)).epsilon(1e-6));
  // Midpoint rule on a linear density reproduces E[s] = 2/3 up to O(h^2).
  CHECK(d.first_moment() == doctest::Approx(2.0 / 3.0).epsilon(1.0 / (n * n)));
}

TEST_CASE("mass_above is continuous and monotone in the threshold") {
  const auto d = ScoreDensity::from_function(100, [](double s) { return 1.0 + std::sin(9 * s); });
  double prev = d.mass_above(0.0);
  for (int k = 1; k <= 1000; ++k) {
    const double t = k / 1000.0;
    const double cur = d.mass_above(t);
    CHECK(cur <= prev + 1e-15);
    CHECK(prev - cur <= 2.0 * 0.001 + 1e-12);
    CHECK(cur + d.mass_below(t) == doctest::Approx(d.mass()).epsilon(1e-13));
    prev = cur;
  }
}

TEST_CASE("densities reject invalid weights") {
  CHECK_THROWS_AS(ScoreDensity({1.0, -0.1}), InvalidArgument);
  CHECK_THROWS_AS(ScoreDensity({1.0, NAN}), InvalidArgument);
  CHECK_THROWS_AS(ScoreDensity(std::vector<double>{}), InvalidArgument);
}

TEST_CASE("calibrated construction is calibrated within the group") {
  const auto f = ScoreDensity::from_function(256, [](double s) { return 0.5 + s * s * 1.5; });
  const auto d = ConditionalScoreDensity::calibrated(f.scaled(1.0 / f.mass()));
  for (std::size_t i = 0; i < d.grid_size(); ++i) {
    const double total = d.f0().weight(i) + d.f1().weight(i);
    CHECK(d.f1().weight(i) / total == doctest::Approx(d.f1().cell_midpoint(i)).epsilon(1e-12));
  }
  CHECK(d.f0().mass() + d.f1().mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("calibrated_with_base_rate hits the requested base rate") {
  for (double br : {0.05, 0.3, 0.5, 0.6, 0.93}) {
    const auto d = ConditionalScoreDensity::calibrated_with_base_rate(1024, br);
    CHECK(d.base_rate() == doctest::Approx(br).epsilon(1e-10));
    CHECK(d.f0().mass() + d.f1().mass() == doctest::Approx(1.0).epsilon(1e-12));
    // Calibration: E[s] over the marginal equals the base rate.
    CHECK(d.marginal().first_moment() == doctest::Approx(br).epsilon(1e-10));
  }
  CHECK_THROWS_AS(ConditionalScoreDensity::calibrated_with_base_rate(64, 0.0), InvalidArgument);
  CHECK_THROWS_AS(ConditionalScoreDensity::calibrated_with_base_rate(64, 1.2), InvalidArgument);
}

TEST_CASE("conditional density requires total mass one") {
  const auto half = ScoreDensity::uniform(8).scaled(0.5);
  CHECK_NOTHROW(ConditionalScoreDensity(half, half));
  CHECK_THROWS_AS(ConditionalScoreDensity(half, half.scaled(0.5)), InvalidArgument);
  CHECK_THROWS_AS(ConditionalScoreDensity(half, ScoreDensity::uniform(16).scaled(0.5)),
                  InvalidArgument);
}

TEST_CASE("population model validation and lookup") {
  const auto d = ConditionalScoreDensity::calibrated(ScoreDensity::uniform(16));
  CHECK_THROWS_AS(PopulationModel({Group{"a", d}}), InvalidArgument);
  CHECK_THROWS_AS(PopulationModel({Group{"a", d}, Group{"a", d}}), InvalidArgument);
  CHECK_THROWS_AS(PopulationModel({Group{"a", d}, Group{"b", d, 0.0}}), InvalidArgument);
  const auto other = ConditionalScoreDensity::calibrated(ScoreDensity::uniform(32));
  CHECK_THROWS_AS(PopulationModel({Group{"a", d}, Group{"b", other}}), InvalidArgument);

  const PopulationModel pop({Group{"a", d, 1.0}, Group{"b", d, 3.0}});
  CHECK(pop.index_of("b") == 1);
  CHECK(pop.share(1) == doctest::Approx(0.75));
  CHECK_THROWS_AS(pop.group("c"), UnknownGroupError);
  CHECK(base_rate(pop, "a") == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("calibration curve of a calibrated group is the identity") {
  const auto d = ConditionalScoreDensity::calibrated_with_base_rate(128, 0.3);
  const PopulationModel pop({Group{"a", d}, Group{"b", d}});
  const auto curve = calibration_curve(pop, "a");
  for (std::size_t i = 0; i < curve.size(); ++i) {
    REQUIRE(curve[i].has_value());
    CHECK(*curve[i] == doctest::Approx(d.f0().cell_midpoint(i)).epsilon(1e-12));
  }
  std::vector<double> w(8, 0.0);
  w[0] = 8.0;
  const PopulationModel sparse({Group{"a", ConditionalScoreDensity(ScoreDensity(w).scaled(0.5),
                                                                   ScoreDensity(w).scaled(0.5))},
                                Group{"b", ConditionalScoreDensity::calibrated(ScoreDensity::uniform(8))}});
  const auto c = calibration_curve(sparse, "a");
  CHECK(c[0].has_value());
  CHECK_FALSE(c[1].has_value());
}

TEST_CASE("score maps transport mass per class") {
  const auto d = ConditionalScoreDensity::calibrated(ScoreDensity::uniform(64));
  const PopulationModel pop({Group{"a", d}, Group{"b", d}});
  const auto moved = apply_score_map(pop, "a", ScoreMap::constant(64, 0.9));
  const auto& m = moved.group("a").density;
  CHECK(m.f1().mass() == doctest::Approx(d.f1().mass()).epsilon(1e-14));
  CHECK(m.f1().mass_above(0.9 - 1.0 / 64) == doctest::Approx(m.f1().mass()).epsilon(1e-14));
  CHECK(moved.group("b").density.f1().weights()[3] == d.f1().weights()[3]);

  CHECK_THROWS_AS(ScoreMap({0.2, 1.1}), InvalidArgument);
  CHECK_THROWS_AS(apply_score_map(pop, "a", ScoreMap::identity(32)), InvalidArgument);
  const auto same = apply_score_map(pop, "a", ScoreMap::identity(64));
  for (std::size_t i = 0; i < 64; ++i)
    CHECK(same.group("a").density.f0().weight(i) == d.f0().weight(i));
}
