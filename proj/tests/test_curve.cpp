#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "support.hpp"

using namespace wplab;
using Catch::Approx;

namespace {

// Plain two-pass coefficient of variation, independent of the library's summation.
double naive_cov(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1)) / m;
}

}  // namespace

TEST_CASE("curve rejects non-positive factors", "[curve]") {
  CHECK_THROWS_AS(DiscountCurve({1.0, 0.0}), InputError);
  CHECK_THROWS_AS(DiscountCurve({1.0, -0.5}), InputError);
  CHECK_THROWS_AS(DiscountCurve(std::vector<double>{}), InputError);
}

TEST_CASE("forwards from a unit curve are zero", "[curve]") {
  const ForwardCurve f = bootstrap_forwards(DiscountCurve(std::vector<double>(10, 1.0)));
  for (int t = 1; t <= 10; ++t) CHECK(f.forward(t) == 0.0);
}

TEST_CASE("forwards from the 2017 euro curve", "[curve]") {
  const DiscountCurve c = testing::eur_curve();
  const ForwardCurve f = bootstrap_forwards(c);
  CHECK(f.forward(1) == Approx(1.0 / 1.004 - 1.0).epsilon(1e-14));
  CHECK(f.forward(1) == Approx(-0.003984).margin(1e-6));
  CHECK(f.forward(15) == Approx(0.855 / 0.839 - 1.0).epsilon(1e-14));
  CHECK(f.forward(15) == Approx(0.01907).margin(1e-5));
}

TEST_CASE("bank account round trip reproduces every discount factor", "[curve]") {
  const DiscountCurve c = testing::eur_curve();
  const ForwardCurve f = bootstrap_forwards(c);
  for (int t = 1; t <= c.horizon(); ++t) {
    CHECK(std::abs(1.0 / f.bank_account(t) - c.factor(t)) / c.factor(t) < 1e-12);
  }
}

TEST_CASE("deterministic deflator reads the curve", "[curve]") {
  const DiscountCurve c = testing::eur_curve();
  CHECK(deterministic_deflator(c, 15) == 0.839);
  CHECK(deterministic_deflator(c, 60) == 0.169);
  CHECK(deterministic_deflator(DiscountCurve::flat(0.0, 3), 1) == 1.0);
  CHECK_THROWS_AS(deterministic_deflator(c, 0), std::out_of_range);
  CHECK_THROWS_AS(deterministic_deflator(c, 61), std::out_of_range);
}

TEST_CASE("max discount factor", "[curve]") {
  const DiscountCurve c = testing::eur_curve();
  CHECK(max_discount_factor(c, 15) == 1.005);
  CHECK(max_discount_factor(c, 1) == 1.004);
  const DiscountCurve decreasing = DiscountCurve::flat(0.02, 30);
  CHECK(max_discount_factor(decreasing, 30) == decreasing.factor(1));
  for (int m = 1; m <= c.horizon(); ++m) {
    for (int t = 1; t <= m; ++t) CHECK(max_discount_factor(c, m) >= c.factor(t));
  }
  CHECK_THROWS_AS(max_discount_factor(c, 61), std::out_of_range);
}

TEST_CASE("deflator CoV at the series tenor is about four percent", "[curve]") {
  const DiscountCurve c = testing::eur_curve();
  const SpotRateSeries s = testing::eur_spot15();
  REQUIRE(s.rates.size() == 37);
  std::vector<double> deflators;
  for (double r : s.rates) deflators.push_back(std::pow(1.0 + r, -15.0));
  const double cov15 = deflator_cov(s, c, 15);
  CHECK(cov15 == Approx(naive_cov(deflators)).epsilon(1e-12));
  CHECK(cov15 == Approx(0.04).margin(0.0025));
}

TEST_CASE("deflator CoV extrapolates linearly in maturity", "[curve]") {
  const DiscountCurve c = testing::eur_curve();
  const SpotRateSeries s = testing::eur_spot15();
  const double at10 = deflator_cov(s, c, 10);
  CHECK(deflator_cov(s, c, 30) == Approx(3.0 * at10).epsilon(1e-12));

  // Direct computation on the same series at 30 years is close to twice the 15-year value.
  std::vector<double> deflators30;
  for (double r : s.rates) deflators30.push_back(std::pow(1.0 + r, -30.0));
  CHECK(deflator_cov(s, c, 30) == Approx(naive_cov(deflators30)).epsilon(0.05));
  CHECK(deflator_cov(s, c, 30) == Approx(2.0 * deflator_cov(s, c, 15)).epsilon(0.05));
}

TEST_CASE("deflator CoV is zero for a constant series and ignores ordering", "[curve]") {
  const DiscountCurve c = testing::eur_curve();
  SpotRateSeries flat{{"a", "b", "c"}, {0.01, 0.01, 0.01}, 15};
  for (int t : {1, 15, 40}) CHECK(deflator_cov(flat, c, t) == 0.0);

  SpotRateSeries s = testing::eur_spot15();
  const double before15 = deflator_cov(s, c, 15);
  const double before40 = deflator_cov(s, c, 40);
  std::mt19937_64 rng(11);
  std::shuffle(s.rates.begin(), s.rates.end(), rng);
  CHECK(deflator_cov(s, c, 15) == before15);
  CHECK(deflator_cov(s, c, 40) == before40);

  SpotRateSeries tiny{{"a"}, {0.01}, 15};
  CHECK_THROWS_AS(deflator_cov(tiny, c, 15), InputError);
}
