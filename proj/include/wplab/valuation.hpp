#pragma once

// Monte Carlo estimators over a projection ledger and the basic-equation leakage test
//   BV_0 + UG_0 = BE + VIF + TAX + E[B_T^{-1} MV_T].

#include <cmath>
#include <vector>

#include "wplab/alm.hpp"
#include "wplab/curve.hpp"
#include "wplab/stats.hpp"

namespace wplab {

struct BestEstimate {
  Estimate be, gb, fdb;
  double gb_curve = 0.0;  // guaranteed flows discounted on the initial curve
};

struct ValueOfInForce {
  Estimate vif, tax;
};

struct ValuationResult {
  Estimate be, gb, fdb, vif, tax, terminal;
  double gb_curve = 0.0;
  double bv0 = 0.0;
  double ug0 = 0.0;
  Estimate residual;  // per-scenario (BV_0 + UG_0) - (deflated outflows + terminal value)
  double relative_residual = 0.0;
  std::size_t scenarios = 0;
};

namespace detail {

template <class Fn>
std::vector<double> per_scenario(const CashflowLedger& ledger, Fn&& fn) {
  if (ledger.scenarios == 0 || ledger.entries.empty()) {
    throw InputError("valuation of an empty ledger");
  }
  std::vector<double> out(ledger.scenarios);
  for (std::size_t i = 0; i < ledger.scenarios; ++i) {
    double s = 0.0;
    for (int t = 1; t <= ledger.horizon; ++t) s += fn(ledger.entry(i, t));
    out[i] = s;
  }
  return out;
}

inline Estimate deflated(const CashflowLedger& ledger, double LedgerEntry::*field) {
  const auto v = per_scenario(ledger, [field](const LedgerEntry& e) { return e.deflator * (e.*field); });
  return block_estimate(v, ledger.block_size);
}

}  // namespace detail

inline double guaranteed_on_curve(const CashflowLedger& ledger, const DiscountCurve& curve) {
  if (ledger.scenarios == 0) throw InputError("valuation of an empty ledger");
  double gb = 0.0;
  for (int t = 1; t <= ledger.horizon; ++t) gb += curve.factor(t) * ledger.entry(0, t).cf_guaranteed;
  return gb;
}

inline BestEstimate best_estimate(const CashflowLedger& ledger, const DiscountCurve* curve = nullptr) {
  BestEstimate r;
  const auto be = detail::per_scenario(ledger, [](const LedgerEntry& e) {
    return e.deflator * (e.cf_guaranteed + e.cf_discretionary);
  });
  r.be = block_estimate(be, ledger.block_size);
  r.gb = detail::deflated(ledger, &LedgerEntry::cf_guaranteed);
  r.fdb = detail::deflated(ledger, &LedgerEntry::cf_discretionary);
  r.gb_curve = curve ? guaranteed_on_curve(ledger, *curve) : r.gb.mean;
  return r;
}

inline ValueOfInForce vif_tax(const CashflowLedger& ledger) {
  return {detail::deflated(ledger, &LedgerEntry::sh), detail::deflated(ledger, &LedgerEntry::tax)};
}

inline ValuationResult value(const CashflowLedger& ledger, const DiscountCurve* curve = nullptr) {
  ValuationResult r;
  const BestEstimate be = best_estimate(ledger, curve);
  const ValueOfInForce vt = vif_tax(ledger);
  r.be = be.be;
  r.gb = be.gb;
  r.fdb = be.fdb;
  r.gb_curve = be.gb_curve;
  r.vif = vt.vif;
  r.tax = vt.tax;
  r.bv0 = ledger.bv0;
  r.ug0 = ledger.ug0();
  r.scenarios = ledger.scenarios;

  std::vector<double> terminal(ledger.scenarios), residual(ledger.scenarios);
  const double a0 = ledger.mv0;
  for (std::size_t i = 0; i < ledger.scenarios; ++i) {
    const LedgerEntry& last = ledger.entry(i, ledger.horizon);
    terminal[i] = last.deflator * last.mv;
    double out = terminal[i];
    for (int t = 1; t <= ledger.horizon; ++t) {
      const LedgerEntry& e = ledger.entry(i, t);
      out += e.deflator * (e.cf_guaranteed + e.cf_discretionary + e.sh + e.tax);
    }
    residual[i] = a0 - out;
  }
  r.terminal = block_estimate(terminal, ledger.block_size);
  r.residual = block_estimate(residual, ledger.block_size);
  r.relative_residual = std::abs(r.residual.mean) / a0;
  return r;
}

struct LeakageResult {
  double residual = 0.0;
  double relative = 0.0;
  double tolerance = 1e-3;
  bool pass = false;
};

inline LeakageResult leakage_test(const ValuationResult& result, double bv0, double ug0,
                                  double tolerance = 1e-3) {
  LeakageResult r;
  const double a0 = bv0 + ug0;
  r.residual = a0 - (result.be.mean + result.vif.mean + result.tax.mean + result.terminal.mean);
  r.relative = std::abs(r.residual) / std::abs(a0);
  r.tolerance = tolerance;
  r.pass = r.relative <= tolerance;
  return r;
}

struct UnexpectedReturnIdentity {
  double lhs = 0.0;  // E[sum_t B_t^{-1} ur_t]
  double rhs = 0.0;  // UG_0 - E[B_T^{-1} UG_T]
  double gap = 0.0;
  double terminal_gains = 0.0;  // E[B_T^{-1} UG_T]
};

inline UnexpectedReturnIdentity unexpected_return_identity(const CashflowLedger& ledger, double ug0) {
  UnexpectedReturnIdentity r;
  r.lhs = detail::deflated(ledger, &LedgerEntry::ur).mean;
  std::vector<double> ug_t(ledger.scenarios);
  for (std::size_t i = 0; i < ledger.scenarios; ++i) {
    const LedgerEntry& last = ledger.entry(i, ledger.horizon);
    ug_t[i] = last.deflator * last.ug;
  }
  r.terminal_gains = stable_mean(ug_t);
  r.rhs = ug0 - r.terminal_gains;
  r.gap = r.lhs - r.rhs;
  return r;
}

}  // namespace wplab
