#include <doctest.h>

#include <cmath>

#include "fairness/errors.hpp"
#include "fairness/utility_analysis.hpp"

using namespace fairness;

TEST_CASE("recommender payoff and optimal threshold") {
  const auto pay = PayoffMatrix::recommender();
  for (double p : {0.0, 0.2, 0.5, 0.9, 1.0}) {
    CHECK(pointwise_eu(p, pay, true) == doctest::Approx(2 * p - 1));
    CHECK(pointwise_eu(p, pay, false) == 0.0);
  }
  CHECK(optimal_threshold(pay) == doctest::Approx(0.5));
  // Reading a book is worth 0.5: watch iff 2p - 1 > 0.5.
  CHECK(optimal_threshold(PayoffMatrix::recommender(0.5)) == doctest::Approx(0.75));
  CHECK(pay.realized(true, true) == 1.0);
  CHECK(pay.realized(true, false) == -1.0);
  CHECK(PayoffMatrix::recommender(0.5).realized(false, true) == 0.5);

  PayoffMatrix bad;
  bad.u11 = -1.0;
  bad.u10 = 1.0;
  CHECK_THROWS_AS(optimal_threshold(bad), InvalidArgument);
  CHECK_THROWS_AS(pointwise_eu(1.5, pay, true), InvalidArgument);
  PayoffMatrix steep;
  steep.u10 = -10.0;
  CHECK(optimal_threshold(steep) == doctest::Approx(10.0 / 11.0));
}

TEST_CASE("long-run utility of calibrated scores on uniform p is 1/4") {
  const auto f = ScoreDensity::uniform(1024);
  const auto pay = PayoffMatrix::recommender();
  CHECK(long_run_eu(f, ScoreMap::identity(1024), pay, 0.5) == doctest::Approx(0.25).epsilon(1e-12));
  // Always watching gives int (2p-1) dp = 0; never watching gives 0.
  CHECK(std::abs(long_run_eu(f, ScoreMap::constant(1024, 0.9), pay, 0.5)) <= 1e-12);
  CHECK(long_run_eu(f, ScoreMap::constant(1024, 0.1), pay, 0.5) == 0.0);
  // Flipped scores act exactly on the wrong half: int_0^{1/2} (2p-1) dp.
  const auto flip = ScoreMap::from_function(1024, [](double p) { return 1 - p; });
  CHECK(long_run_eu(f, flip, pay, 0.5) == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK_THROWS_AS(long_run_eu(f.scaled(2.0), ScoreMap::identity(1024), pay, 0.5),
                  InvalidArgument);
  CHECK_THROWS_AS(long_run_eu(f, ScoreMap::identity(512), pay, 0.5), InvalidArgument);
}

TEST_CASE("case breakdown splits the loss") {
  const auto f = ScoreDensity::uniform(1000);
  const auto b = classify_cases(f, ScoreMap::constant(1000, 0.9), 0.5);
  CHECK(b.cases[0].mass == 0.0);
  CHECK(b.cases[1].mass == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(b.cases[2].mass == 0.0);
  CHECK(b.cases[3].mass == doctest::Approx(0.5).epsilon(1e-12));
  // Case 2 loss: int_0^{1/2} (1 - 2p) dp = 1/4.
  CHECK(b.cases[1].loss == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(b.total_loss() == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(b.wrong_mass() == doctest::Approx(0.5).epsilon(1e-12));
  const auto c = b.as_confusion();
  CHECK(c.fp == b.cases[1].mass);
  CHECK(c.tp == b.cases[3].mass);

  const std::vector<ScoredMass> atoms{{0.1, 0.9, 0.2}, {0.8, 0.3, 0.1}, {0.7, 0.7, 0.7}};
  const auto a = classify_cases(atoms, PayoffMatrix::recommender(), 0.5);
  CHECK(a.cases[1].loss == doctest::Approx(0.2 * 0.8));
  CHECK(a.cases[2].loss == doctest::Approx(0.1 * 0.6));
  CHECK(a.cases[3].loss == 0.0);
  CHECK(long_run_eu(atoms, PayoffMatrix::recommender(), 0.5) ==
        doctest::Approx(0.2 * -0.8 + 0.7 * 0.4));
}

TEST_CASE("Monte Carlo estimate agrees with the analytic value") {
  const auto f = ScoreDensity::uniform(1024);
  const auto mc = monte_carlo_eu(f, ScoreMap::identity(1024), PayoffMatrix::recommender(), 0.5,
                                 200000, 7);
  CHECK(mc.samples == 200000);
  CHECK(std::abs(mc.mean - 0.25) <= 4 * mc.standard_error);
  // Per-sample utility takes values -1, 0, 1 with P(|U|=1) = 1/2 and mean 1/4.
  CHECK(mc.standard_error == doctest::Approx(std::sqrt((0.5 - 0.0625) / 200000)).epsilon(0.02));
}

TEST_CASE("judge disutility conventions") {
  const auto a = ConditionalScoreDensity::calibrated_with_base_rate(1024, 0.3);
  const auto b = ConditionalScoreDensity::calibrated_with_base_rate(1024, 0.6);
  const PopulationModel pop({Group{"a", a}, Group{"b", b}});
  const auto rule = DecisionRule::shared_threshold(pop.labels(), 0.5);
  const auto outcome = judge_disutility(pop, rule, Convention::kPerOutcome);
  const auto person = judge_disutility(pop, rule, Convention::kPerPerson);
  const auto ca = confusion(a, Deterministic{0.5});
  const auto cb = confusion(b, Deterministic{0.5});
  CHECK(outcome.value("a") == doctest::Approx(ca.fn / (ca.fn + ca.tp)));
  CHECK(person.value("b") == doctest::Approx(cb.fn));
  CHECK(outcome.disparity ==
        doctest::Approx(std::abs(*rates(ca).fnr - *rates(cb).fnr)).epsilon(1e-15));
  CHECK_THROWS_AS(outcome.value("zz"), UnknownGroupError);
  // Identity: per-person = per-outcome times the base rate.
  CHECK(person.value("a") == doctest::Approx(outcome.value("a") * 0.3).epsilon(1e-9));

  CHECK(parse_convention("per-person") == Convention::kPerPerson);
  CHECK(to_string(Convention::kPerOutcome) == "per-outcome");
  CHECK_THROWS_AS(parse_convention("both"), InvalidArgument);

  const auto v = disparity_verdict(outcome, 1e-6);
  CHECK(v.magnitude == outcome.disparity);
  CHECK(v.holds == (outcome.disparity <= 1e-6));
}

TEST_CASE("utility report disparity is max minus min") {
  const auto r = make_utility_report({{"a", 0.1}, {"b", 0.4}, {"c", 0.25}}, 0.01);
  CHECK(r.disparity == doctest::Approx(0.3));
  CHECK_FALSE(r.verdict);
  CHECK(make_utility_report({{"a", 0.2}, {"b", 0.2}}, 0.0).verdict);
}
