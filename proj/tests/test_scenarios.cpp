#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "support.hpp"

using namespace wplab;
using Catch::Approx;

TEST_CASE("zero volatility collapses to the deterministic forward path", "[scenarios]") {
  const DiscountCurve c = testing::eur_curve();
  const ForwardCurve f = bootstrap_forwards(c);
  const ScenarioSet s = generate(c, RateModelParams{0.1, 0.0}, 7, 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (int t = 1; t <= s.horizon(); ++t) {
      CHECK(s.forward(i, t) == Approx(f.forward(t)).margin(1e-15));
    }
  }
  CHECK(martingale_test(s, c).max_error <= 1e-12);
}

TEST_CASE("bank account recursion and unit start", "[scenarios]") {
  const DiscountCurve c = testing::eur_curve();
  const ScenarioSet s = generate(c, RateModelParams{}, 64, 5, 30);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s.bank_account(i, 0) == 1.0);
    for (int t = 1; t <= s.horizon(); ++t) {
      CHECK(s.bank_account(i, t) == Approx(s.bank_account(i, t - 1) * (1.0 + s.forward(i, t))).epsilon(1e-13));
    }
  }
}

TEST_CASE("generation is deterministic and independent of thread count", "[scenarios]") {
  const DiscountCurve c = testing::eur_curve();
  GenerationOptions one{true, 1}, many{true, 8};
  const ScenarioSet a = generate(c, RateModelParams{}, 501, 99, 0, one);
  const ScenarioSet b = generate(c, RateModelParams{}, 501, 99, 0, many);
  const ScenarioSet other = generate(c, RateModelParams{}, 501, 100, 0, one);
  bool any_difference = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int t = 1; t <= a.horizon(); ++t) {
      REQUIRE(a.forward(i, t) == b.forward(i, t));
      REQUIRE(a.deflator(i, t) == b.deflator(i, t));
      any_difference = any_difference || a.forward(i, t) != other.forward(i, t);
    }
  }
  CHECK(any_difference);
}

TEST_CASE("antithetic pairs mirror their innovations", "[scenarios]") {
  const DiscountCurve c = testing::eur_curve();
  const ScenarioSet s = generate(c, RateModelParams{}, 200, 17, 20);
  REQUIRE(s.block_size() == 2);
  for (std::size_t i = 0; i < s.size(); i += 2) {
    for (int t = 1; t <= s.horizon(); ++t) {
      CHECK(s.rate_shock(i, t) + s.rate_shock(i + 1, t) == 0.0);
      CHECK(s.equity_shock(i, t) + s.equity_shock(i + 1, t) == 0.0);
      CHECK(s.state(i, t) == -s.state(i + 1, t));
    }
  }
}

TEST_CASE("mean deflator at 15 years with one percent volatility", "[scenarios]") {
  const DiscountCurve c = testing::eur_curve();
  const ScenarioSet s = generate(c, RateModelParams{0.1, 0.01}, 10000, 2017);
  const MartingaleDiagnostics d = martingale_test(s, c);
  CHECK(d.relative_error[14] <= 5e-3);
  CHECK(d.mean_deflator[14] == Approx(0.839).epsilon(5e-3));
}

TEST_CASE("martingale test passes for the shipped defaults", "[scenarios]") {
  const DiscountCurve c = testing::eur_curve();
  const ScenarioSet s = generate(c, RateModelParams{}, 10000, 2017);
  const MartingaleDiagnostics d = martingale_test(s, c);
  CHECK(d.pass);
  CHECK(d.max_error <= 5e-3);
  CHECK(d.relative_error.size() == 60);
}

TEST_CASE("bumped forwards fail the martingale test by about duration times the bump", "[scenarios]") {
  const DiscountCurve c = testing::eur_curve();
  const ForwardCurve f = bootstrap_forwards(c);
  const int T = c.horizon();
  std::vector<double> bumped;
  for (int i = 0; i < 4; ++i) {
    for (int t = 1; t <= T; ++t) bumped.push_back(f.forward(t) + 0.01);
  }
  const ScenarioSet s = ScenarioSet::from_forwards(4, T, bumped);
  const MartingaleDiagnostics d = martingale_test(s, c);
  CHECK_FALSE(d.pass);
  // Relative error of a deflator shifted by 1% a year is 1 - prod 1/(1 + 0.01/(1+F)).
  CHECK(d.relative_error[9] == Approx(0.094).margin(0.01));
  CHECK(d.relative_error[59] > 0.4);
  CHECK(d.worst_tenor == 60);
}

TEST_CASE("zero-coupon prices are martingales when deflated", "[scenarios]") {
  const DiscountCurve c = testing::eur_curve();
  const ScenarioSet s = generate(c, RateModelParams{}, 20000, 8, 30);
  for (int t : {1, 5, 10}) {
    for (int m : {t + 1, t + 7, 30}) {
      std::vector<double> v(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) v[i] = s.deflator(i, t) * s.bond_price(i, t, m);
      CHECK(stable_mean(v) == Approx(c.factor(m)).epsilon(2e-3));
    }
  }
}

TEST_CASE("model bond prices at time zero equal the curve", "[scenarios]") {
  const DiscountCurve c = testing::eur_curve();
  const GaussianShortRate model(c, RateModelParams{0.2, 0.008});
  for (int s = 0; s <= c.horizon(); ++s) CHECK(model.bond_price(0, s, 0.0) == Approx(c.factor(s)).epsilon(1e-14));
  CHECK_THROWS_AS(model.bond_price(5, 4, 0.0), std::out_of_range);
}

TEST_CASE("scenario generation rejects bad requests", "[scenarios]") {
  const DiscountCurve c = testing::eur_curve();
  CHECK_THROWS_AS(generate(c, RateModelParams{}, 0, 1), InputError);
  CHECK_THROWS_AS(generate(c, RateModelParams{}, 10, 1, 61), InputError);
  CHECK_THROWS_AS(generate(c, RateModelParams{0.0, 0.01}, 10, 1), InputError);
  CHECK_THROWS_AS(generate(c, RateModelParams{0.1, -0.01}, 10, 1), InputError);
  const ScenarioSet s = generate(c, RateModelParams{}, 2, 1, 70 - 10);
  CHECK_THROWS_AS(martingale_test(s, DiscountCurve::flat(0.01, 10)), InputError);
}
