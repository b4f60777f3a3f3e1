#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "wplab/wplab.hpp"

namespace wplab::testing {

inline DiscountCurve eur_curve() { return io::read_curve(io::data_dir() / "eur_discount_2017.csv"); }

inline SpotRateSeries eur_spot15() { return io::read_spot_series(io::data_dir() / "eur_spot15_2014_2017.csv", 15); }

inline Portfolio toy_matched() { return io::read_portfolio(io::data_dir() / "toy_matched.json").portfolio; }

inline Portfolio toy_stochastic() { return io::read_portfolio(io::data_dir() / "toy_stochastic.json").portfolio; }

inline BoundInputs allianz() { return io::read_bound_inputs(io::data_dir() / "allianz_leben_2017.json").inputs; }

inline ScenarioSet scenarios_for(const Portfolio& pf, const DiscountCurve& curve, std::size_t n, std::uint64_t seed,
                                 RateModelParams params = {}) {
  return generate(curve, params, n, seed, projection_horizon(pf, {}));
}

// A solvent run-off book: 2-3 contracts with low technical rates, 1-3 seasoned bonds, an
// optional equity holding, and cash that closes the statutory balance sheet.
inline Portfolio random_toy(std::mt19937_64& rng) {
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto integer = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  Portfolio pf;
  pf.rules.gph = uniform(0.7, 0.9);
  pf.rules.tax_rate = 0.25;
  pf.rules.theta = uniform(0.08, 0.15);
  pf.rules.smoothing = uniform(0.3, 0.7);
  pf.rules.reinvestment_term = integer(5, 10);

  const int n_contracts = integer(2, 3);
  for (int k = 0; k < n_contracts; ++k) {
    const double reserve = uniform(40.0, 120.0);
    const double rate = uniform(0.0, 0.0075);
    const int maturity = integer(4, 15);
    const std::string id = "c" + std::to_string(k);
    pf.contracts.push_back(k % 2 == 0 ? Contract::pure_endowment(id, reserve, rate, maturity)
                                      : Contract::annuity(id, reserve, rate, maturity));
  }
  pf.surplus_fund = uniform(0.03, 0.08) * pf.reserve(0);
  const double liabilities = pf.reserve(0) + pf.surplus_fund;

  double invested = 0.0;
  const int n_bonds = integer(1, 3);
  for (int k = 0; k < n_bonds; ++k) {
    Asset b;
    b.id = "b" + std::to_string(k);
    b.kind = AssetKind::bond;
    b.face = uniform(0.15, 0.3) * liabilities;
    b.coupon = uniform(0.0, 0.03);
    b.maturity = integer(2, 12);
    b.book_value = b.face * uniform(0.95, 1.05);
    invested += b.book_value;
    pf.assets.push_back(b);
  }
  if (integer(0, 1) == 1) {
    Asset e;
    e.id = "eq";
    e.kind = AssetKind::equity;
    e.market_value = uniform(0.02, 0.06) * liabilities;
    e.book_value = e.market_value * uniform(0.8, 1.0);
    e.dividend_yield = uniform(0.0, 0.03);
    e.volatility = uniform(0.05, 0.15);
    invested += e.book_value;
    pf.assets.push_back(e);
  }
  Asset cash;
  cash.id = "cash";
  cash.kind = AssetKind::cash;
  cash.market_value = liabilities - invested;
  cash.book_value = cash.market_value;
  pf.assets.push_back(cash);
  pf.validate();
  return pf;
}

struct BoundCheck {
  double fdb = 0.0;
  double fdb_se = 0.0;
  double lb = 0.0;
  double ph_star = 0.0;      // E[sum B_t^-1 ph*_t]
  double ph_undiscounted = 0.0;  // E[sum ph*_t]
  double vif = 0.0;
  double tax = 0.0;
  double gph = 0.0;
  double max_discount = 0.0;
  double cov_ph = 0.0;
};

inline double sample_cov(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1)) / mean;
}

// Lower bound for a simulated book built from its own contracts: per-contract depreciation
// with simulated deflator and participation dispersion, cross-financing from the initial
// surplus fund ratio.
inline BoundCheck bound_check(const Portfolio& pf, const DiscountCurve& curve, const ScenarioSet& sc,
                              const CashflowLedger& ledger) {
  BoundCheck out;
  const std::size_t n = ledger.scenarios;
  const ValuationResult v = value(ledger, &curve);
  out.fdb = v.fdb.mean;
  out.fdb_se = v.fdb.std_error;
  out.vif = v.vif.mean;
  out.tax = v.tax.mean;
  out.gph = pf.rules.gph;

  std::vector<double> ph_deflated(n), ph_plain(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int t = 1; t <= ledger.horizon; ++t) {
      const LedgerEntry& e = ledger.entry(i, t);
      ph_deflated[i] += e.deflator * e.ph;
      ph_plain[i] += e.ph;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.ph_star += ph_deflated[i] / static_cast<double>(n);
    out.ph_undiscounted += ph_plain[i] / static_cast<double>(n);
  }
  out.cov_ph = sample_cov(ph_deflated);
  out.max_discount = max_discount_factor(curve, ledger.horizon);

  const double a0 = ledger.mv0;
  const double tr0 = pf.reserve(0);
  const int T = ledger.horizon;
  const double c0 = pf.surplus_fund / a0;
  std::vector<ContractDepreciation> parts;
  double cross = 0.0;
  double gb_total = 0.0;
  for (const auto& c : pf.contracts) {
    ContractDepreciation d;
    d.a0 = a0 * c.reserve(0) / tr0;
    for (int t = 1; t <= c.maturity; ++t) d.gb += curve.factor(t) * c.guaranteed_flow(t);
    std::vector<double> deflators(n);
    for (std::size_t i = 0; i < n; ++i) deflators[i] = sc.deflator(i, c.maturity);
    const double cov_b = sample_cov(deflators);
    d.eta = eta(curve.factor(c.maturity), cov_b, out.cov_ph, pf.rules.gph);
    cross += c0 * depreciation(d.eta) * static_cast<double>(T - c.maturity) / static_cast<double>(T) * d.a0;
    gb_total += d.gb;
    parts.push_back(d);
  }
  out.lb = weighted_depreciation(parts) * (a0 - gb_total) - cross;
  return out;
}

}  // namespace wplab::testing
