#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace wplab;
using Catch::Approx;

TEST_CASE("eta", "[bound]") {
  CHECK(eta(0.84, 0.04, 0.05, 0.8) == Approx(0.84 * (1.0 - 0.002) * 4.0).epsilon(1e-14));
  CHECK(eta(0.84, 0.04, 0.05, 0.8) == Approx(3.35).margin(0.005));
  CHECK(eta(0.9, 0.04, 0.05, 0.0) == 0.0);
  CHECK(eta(1.0, 0.0, 0.05, 0.5) == Approx(1.0));
  CHECK(eta(1.0, 0.04, 0.0, 0.5) == Approx(1.0));
  CHECK_THROWS_AS(eta(0.84, 0.04, 0.05, 1.0), InputError);
}

TEST_CASE("depreciation factor", "[bound]") {
  CHECK(depreciation(3.35) == Approx(0.77).margin(0.001));
  CHECK(depreciation(0.0) == 0.0);
  CHECK(depreciation(1.0) == 0.5);
  CHECK(depreciation(2.0) > depreciation(1.9));
}

TEST_CASE("weighted depreciation", "[bound]") {
  const std::vector<ContractDepreciation> one{{100.0, 60.0, 3.0}};
  CHECK(weighted_depreciation(one) == Approx(0.75));
  const std::vector<ContractDepreciation> same{{100.0, 60.0, 3.0}, {50.0, 30.0, 3.0}};
  CHECK(weighted_depreciation(same) == Approx(0.75));
  // Weights 40/60 and 20/60 on D = 0.75 and D = 0.5.
  const std::vector<ContractDepreciation> mixed{{100.0, 60.0, 3.0}, {50.0, 30.0, 1.0}};
  CHECK(weighted_depreciation(mixed) == Approx(40.0 / 60.0 * 0.75 + 20.0 / 60.0 * 0.5).epsilon(1e-15));
  const std::vector<ContractDepreciation> flat{{50.0, 50.0, 3.0}};
  CHECK_THROWS_AS(weighted_depreciation(flat), InputError);
}

TEST_CASE("geometric run-off", "[bound]") {
  const double a0 = 192.3 + 43.2;
  const auto b = geometric_runoff(a0, 60, 10.0);
  REQUIRE(b.size() == 60);
  double sum = 0.0;
  for (double x : b) sum += x;
  CHECK(sum == Approx(a0).epsilon(1e-12));
  CHECK(runoff_remaining(a0, 10, 10.0) == Approx(117.75).epsilon(1e-14));
  CHECK(b[59] == Approx(a0 * std::exp2(-5.9)).epsilon(1e-12));
  CHECK(b[59] / a0 == Approx(0.0167).margin(1e-4));
  CHECK(b[0] == Approx(a0 * (1.0 - std::exp2(-0.1))).epsilon(1e-12));
  // Remaining value after s years is everything in buckets s+1..T.
  double tail = 0.0;
  for (int t = 11; t <= 60; ++t) tail += b[t - 1];
  CHECK(tail == Approx(runoff_remaining(a0, 10, 10.0)).epsilon(1e-12));
}

TEST_CASE("cross-financing term", "[bound]") {
  const BoundInputs in = testing::allianz();
  const auto buckets = geometric_runoff(in.a0(), 60, 10.0);
  const double f3 = cross_financing_F(buckets, 0.03, 0.8, in.curve, in.cov_b, 0.05);
  CHECK(f3 == Approx(4.1).margin(0.05));
  CHECK(cross_financing_F(buckets, 0.0, 0.8, in.curve, in.cov_b, 0.05) == 0.0);
  const double f1 = cross_financing_F(buckets, 0.01, 0.8, in.curve, in.cov_b, 0.05);
  const double f5 = cross_financing_F(buckets, 0.05, 0.8, in.curve, in.cov_b, 0.05);
  CHECK(f5 / f1 == Approx(5.0).epsilon(1e-12));
  CHECK_THROWS_AS(cross_financing_F(buckets, 0.03, 0.8, DiscountCurve::flat(0.01, 30), in.cov_b, 0.05), InputError);
}

TEST_CASE("headline lower bound", "[bound]") {
  const BoundInputs in = testing::allianz();
  const LowerBoundResult r = lower_bound(in);
  CHECK(r.depreciation == 0.77);
  CHECK(r.lb1 == Approx(62.68).margin(0.005));
  CHECK(r.cross_financing == Approx(4.1));
  CHECK(r.lb == Approx(48.2).margin(0.05));
  CHECK(r.lb == Approx(r.lb1 - in.surplus_fund - r.cross_financing).epsilon(1e-15));
  CHECK(r.buckets.size() == 60);

  BoundInputs exact = in;
  exact.convention = BoundConvention::exact;
  const LowerBoundResult e = lower_bound(exact);
  CHECK(e.lb == Approx(48.2).margin(0.1));
  CHECK(e.depreciation > 0.0);
  CHECK(e.depreciation < 1.0);
  CHECK(e.cross_financing >= 0.0);
}

TEST_CASE("degenerate bound inputs", "[bound]") {
  BoundInputs in = testing::allianz();
  in.convention = BoundConvention::exact;
  in.surplus_fund = 0.0;
  in.c0 = 0.0;
  LowerBoundResult r = lower_bound(in);
  CHECK(r.cross_financing == 0.0);
  CHECK(r.lb == r.lb1);

  in = testing::allianz();
  in.guaranteed = in.a0();
  r = lower_bound(in);
  CHECK(r.lb1 == 0.0);
  CHECK(r.lb == Approx(-in.surplus_fund - r.cross_financing));

  in = testing::allianz();
  in.deduct_surplus_fund = false;
  CHECK(lower_bound(in).lb == Approx(lower_bound(testing::allianz()).lb + in.surplus_fund));
}

TEST_CASE("exact max-discount mode divides eta by the curve maximum", "[bound]") {
  BoundInputs in = testing::allianz();
  in.convention = BoundConvention::exact;
  const LowerBoundResult base = lower_bound(in);
  in.exact_max_discount = true;
  const LowerBoundResult adjusted = lower_bound(in);
  CHECK(adjusted.eta == Approx(base.eta / 1.005).epsilon(1e-14));
  CHECK(adjusted.lb < base.lb);
}

TEST_CASE("grid cells agree with direct evaluation", "[bound]") {
  const BoundInputs base = testing::allianz();
  const std::vector<int> ms{10, 15, 20};
  const std::vector<double> gphs{0.75, 0.8, 0.85};
  const std::vector<double> c0s{0.01, 0.03, 0.05};
  const SensitivityGrid g = sensitivity_grid(base, ms, gphs, c0s);
  REQUIRE(g.cells.size() == 27);
  for (const auto& cell : g.cells) {
    BoundInputs in = base;
    in.anchor_maturity = cell.maturity;
    in.gph = cell.gph;
    in.c0 = cell.c0;
    const LowerBoundResult r = lower_bound(in);
    CHECK(r.lb == cell.lb);
    CHECK(r.cross_financing == cell.cross_financing);
  }
  CHECK(g.cell(15, 0.8, 0.03).lb == Approx(48.2).margin(0.05));
  CHECK(g.cell(10, 0.75, 0.05).lb == Approx(42.6).margin(0.05));
  CHECK(g.cell(20, 0.85, 0.01).lb == Approx(54.0).margin(0.05));
  CHECK(g.cell(15, 0.85, 0.01).lb == Approx(55.7).margin(0.05));
  CHECK_THROWS_AS(g.cell(12, 0.8, 0.03), std::out_of_range);
}

TEST_CASE("lower bound monotonicity", "[bound]") {
  BoundInputs base = testing::allianz();
  base.convention = BoundConvention::exact;
  std::vector<int> ms;
  for (int m = 2; m <= 40; ++m) ms.push_back(m);
  const std::vector<double> gphs{0.5, 0.6, 0.7, 0.75, 0.8, 0.85, 0.9};
  const std::vector<double> c0s{0.0, 0.01, 0.02, 0.03, 0.05, 0.08};
  const SensitivityGrid g = sensitivity_grid(base, ms, gphs, c0s);
  for (int m : ms) {
    for (double c0 : c0s) {
      for (std::size_t k = 1; k < gphs.size(); ++k) CHECK(g.cell(m, gphs[k], c0).lb >= g.cell(m, gphs[k - 1], c0).lb);
    }
    for (double gph : gphs) {
      for (std::size_t k = 1; k < c0s.size(); ++k) CHECK(g.cell(m, gph, c0s[k]).lb <= g.cell(m, gph, c0s[k - 1]).lb);
    }
  }
  // Past the curve's peak at t = 2, longer anchors only lower the bound.
  for (double gph : gphs) {
    for (double c0 : c0s) {
      for (std::size_t k = 1; k < ms.size(); ++k) CHECK(g.cell(ms[k], gph, c0).lb <= g.cell(ms[k - 1], gph, c0).lb);
    }
  }
}

TEST_CASE("bound holds on simulated toy books", "[bound]") {
  const DiscountCurve c = testing::eur_curve();
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 3; ++k) {
    const Portfolio pf = testing::random_toy(rng);
    const ScenarioSet s = testing::scenarios_for(pf, c, 1000, 50 + k);
    const CashflowLedger l = project(s, pf);
    const testing::BoundCheck b = testing::bound_check(pf, c, s, l);
    CHECK(b.fdb >= b.lb - 2.0 * b.fdb_se);
    CHECK(b.ph_star >= b.gph * (b.vif + b.ph_star + b.tax) - 1e-9);
    CHECK(b.ph_star <= b.max_discount * b.ph_undiscounted);
  }
}
