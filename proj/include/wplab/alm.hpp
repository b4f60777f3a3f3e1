#pragma once

// Statutory run-off projection of a with-profit book, one scenario at a time.
//
// Each year: asset income and book accruals, strict lower-of-cost-or-market on equity,
// guaranteed and maturing discretionary payments, funding sales, gross surplus and its
// split, surplus fund declarations and cap, then reinvestment in par bonds. Asset book
// value equals liability book value (reserves + bonus accounts + surplus fund) after
// every step.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wplab/errors.hpp"
#include "wplab/parallel.hpp"
#include "wplab/portfolio.hpp"
#include "wplab/scenarios.hpp"

namespace wplab {

struct SurplusSplit {
  double policyholder = 0.0;
  double tax = 0.0;
  double shareholder = 0.0;
};

// gs* = sh + ph* + tax. A negative surplus is borne by the shareholder (capital injection).
inline SurplusSplit declare_split(double gross_surplus, const ManagementRules& rules) {
  SurplusSplit s;
  s.policyholder = rules.gph * std::max(gross_surplus, 0.0);
  s.tax = rules.tax_rate * std::max(gross_surplus - s.policyholder, 0.0);
  s.shareholder = gross_surplus - s.policyholder - s.tax;
  return s;
}

inline double unexpected_return(double roa, double forward_prev, double book_value_prev) {
  return roa - forward_prev * book_value_prev;
}

struct LocmResult {
  double book_value = 0.0;
  double write_down = 0.0;
};

// Strict lower of cost or market.
inline LocmResult apply_locm(double book_value, double market_value) {
  if (market_value < book_value) return {market_value, book_value - market_value};
  return {book_value, 0.0};
}

struct SfCapResult {
  double surplus_fund = 0.0;
  double forced_declaration = 0.0;
};

inline SfCapResult enforce_sf_cap(double surplus_fund, double reserves, double theta) {
  if (!(theta > 0.0)) throw InputError("surplus fund cap theta must be > 0");
  const double cap = theta * std::max(reserves, 0.0);
  if (surplus_fund > cap) return {cap, surplus_fund - cap};
  return {surplus_fund, 0.0};
}

struct LedgerEntry {
  double cf_guaranteed = 0.0;
  double cf_discretionary = 0.0;
  double sh = 0.0;
  double tax = 0.0;
  double ph = 0.0;        // policyholder share of gross surplus, credited to the surplus fund
  double gs = 0.0;        // gross surplus gs*
  double declared = 0.0;  // surplus fund moved to contract bonus accounts (smoothing + cap)
  double roa = 0.0;
  double ur = 0.0;
  double bv = 0.0;
  double mv = 0.0;
  double ug = 0.0;
  double sf = 0.0;
  double reserves = 0.0;  // technical reserves incl. bonus accounts
  // book return components: roa = income + amortization + realized - write_down
  double income = 0.0;
  double amortization = 0.0;
  double realized = 0.0;
  double write_down = 0.0;
  double forward = 0.0;   // F_{t-1}
  double deflator = 0.0;  // B_t^{-1}
};

struct ContractPayout {
  double attributed = 0.0;  // declarations credited to the contract
  double paid = 0.0;        // discretionary benefit paid at maturity
};

// Write-once result of a projection run: entries for scenarios 0..n-1 and years 1..T.
struct CashflowLedger {
  std::size_t scenarios = 0;
  int horizon = 0;
  std::size_t block_size = 1;
  double bv0 = 0.0;
  double mv0 = 0.0;
  double sf0 = 0.0;
  std::vector<std::string> contract_ids;
  std::vector<LedgerEntry> entries;      // scenario-major
  std::vector<ContractPayout> payouts;   // scenario-major, one per contract
  std::vector<double> dropped;           // fault injection: flow removed from the record, per scenario
  std::optional<int> dropped_year;

  double ug0() const { return mv0 - bv0; }
  const LedgerEntry& entry(std::size_t i, int t) const {
    return entries[i * static_cast<std::size_t>(horizon) + static_cast<std::size_t>(t - 1)];
  }
  LedgerEntry& entry(std::size_t i, int t) {
    return entries[i * static_cast<std::size_t>(horizon) + static_cast<std::size_t>(t - 1)];
  }
  const ContractPayout& payout(std::size_t i, std::size_t c) const {
    return payouts[i * contract_ids.size() + c];
  }
};

struct ProjectionOptions {
  int horizon = 0;                         // 0: portfolio horizon, else last maturity
  std::optional<int> drop_cashflow_year;  // leave that year's guaranteed flow out of the ledger
  unsigned threads = 0;
};

namespace detail {

struct BondPosition {
  double face = 0.0;
  double coupon = 0.0;
  int maturity = 0;  // absolute year
  int start = 0;     // year the amortization schedule starts
  double start_book = 0.0;
  double book = 0.0;
  double market = 0.0;

  double amortized_book(int t) const {
    const double frac = static_cast<double>(t - start) / static_cast<double>(maturity - start);
    return start_book + (face - start_book) * frac;
  }
  void scale(double keep) {
    face *= keep;
    start_book *= keep;
    book *= keep;
    market *= keep;
  }
};

struct EquityPosition {
  double market = 0.0;
  double book = 0.0;
  double dividend_yield = 0.0;
  double volatility = 0.0;
  void scale(double keep) {
    market *= keep;
    book *= keep;
  }
};

inline double bond_market_value(const ScenarioSet& sc, std::size_t i, int t, const BondPosition& b) {
  if (b.maturity <= t) return 0.0;
  double v = 0.0;
  for (int k = t + 1; k <= b.maturity; ++k) v += b.coupon * b.face * sc.bond_price(i, t, k);
  return v + b.face * sc.bond_price(i, t, b.maturity);
}

class ScenarioProjection {
 public:
  ScenarioProjection(const ScenarioSet& sc, const Portfolio& pf, std::size_t scenario, int horizon,
                     const ProjectionOptions& opts, CashflowLedger& ledger)
      : sc_(sc), pf_(pf), i_(scenario), horizon_(horizon), opts_(opts), ledger_(ledger),
        last_maturity_(pf.last_maturity()) {
    bonus_.assign(pf.contracts.size(), 0.0);
    for (const auto& a : pf.assets) {
      switch (a.kind) {
        case AssetKind::bond: {
          BondPosition b{a.face, a.coupon, a.maturity, 0, a.book_value, a.book_value, 0.0};
          bonds_.push_back(b);
          break;
        }
        case AssetKind::equity:
          equities_.push_back({a.market_value, a.book_value, a.dividend_yield, a.volatility});
          break;
        case AssetKind::cash:
          cash_ += a.market_value;
          break;
      }
    }
    sf_ = pf.surplus_fund;
    bv_prev_ = pf.reserve(0) + sf_;
  }

  void run() {
    for (int t = 1; t <= horizon_; ++t) step(t);
  }

 private:
  void step(int t) {
    LedgerEntry& e = ledger_.entry(i_, t);
    const double F = sc_.forward(i_, t);
    e.forward = F;
    e.deflator = sc_.deflator(i_, t);

    // Asset income and book accruals.
    double income = cash_ * F;
    cash_ += income;
    for (auto& b : bonds_) {
      const double coupon = b.coupon * b.face;
      income += coupon;
      cash_ += coupon;
      if (b.maturity == t) {
        e.amortization += b.face - b.book;
        cash_ += b.face;
        b.book = b.face = 0.0;
      } else {
        const double book = b.amortized_book(t);
        e.amortization += book - b.book;
        b.book = book;
      }
    }
    std::erase_if(bonds_, [t](const BondPosition& b) { return b.maturity <= t; });
    for (auto& b : bonds_) b.market = bond_market_value(sc_, i_, t, b);

    for (auto& q : equities_) {
      const double z = sc_.equity_shock(i_, t);
      const double cum = q.market * (1.0 + F) * std::exp(q.volatility * z - 0.5 * q.volatility * q.volatility);
      const double dividend = q.dividend_yield * cum;
      q.market = cum - dividend;
      income += dividend;
      cash_ += dividend;
      const LocmResult locm = apply_locm(q.book, q.market);
      q.book = locm.book_value;
      e.write_down += locm.write_down;
    }
    e.income = income;

    // Liability outgo.
    double cf_guaranteed = 0.0;
    double cf_discretionary = 0.0;
    double reserves = 0.0;
    bool alive = false;
    for (std::size_t c = 0; c < pf_.contracts.size(); ++c) {
      const Contract& k = pf_.contracts[c];
      cf_guaranteed += k.guaranteed_flow(t);
      reserves += k.reserve(t);
      if (k.maturity == t) {
        ledger_.payouts[i_ * pf_.contracts.size() + c].paid = bonus_[c];
        cf_discretionary += bonus_[c];
        bonus_[c] = 0.0;
      }
      if (k.maturity > t) alive = true;
    }
    const double bonus_total = total_bonus();
    cash_ -= cf_guaranteed + cf_discretionary;

    // Sales: full liquidation once the book has run off, otherwise fund any cash shortfall.
    if (!alive) {
      e.realized += sell_fraction(1.0, t);
    } else if (cash_ < 0.0) {
      const double need = -cash_;
      const double available = saleable_market_value();
      if (need > available * (1.0 + 1e-12)) {
        throw InsolvencyError(i_, t, "assets exhausted before liabilities (need " + std::to_string(need) +
                                         ", available " + std::to_string(available) + ")");
      }
      e.realized += sell_fraction(need / available, t);
    }

    double roa = e.income + e.amortization + e.realized - e.write_down;
    double gs = bv_prev_ + roa - cf_guaranteed - cf_discretionary - (reserves + bonus_total + sf_);

    // Realize unrealized gains pro rata before the shareholder has to inject capital.
    if (alive && gs < 0.0 && pf_.rules.realization == RealizationRule::pro_rata_shortfall) {
      const double gains = positive_unrealized_gains();
      if (gains > 0.0) {
        const double f = std::min(1.0, -gs / gains);
        const double realized = realize_gains(f);
        e.realized += realized;
        roa += realized;
        gs += realized;
      }
    }

    const SurplusSplit split = declare_split(gs, pf_.rules);
    sf_ += split.policyholder;

    // Declarations from the surplus fund to the contracts still in force.
    double declared = 0.0;
    double sf_payout = 0.0;
    if (alive) {
      const double smoothing = pf_.rules.smoothing * sf_;
      sf_ -= smoothing;
      declared += smoothing;
      attribute(smoothing, t);
    }
    const SfCapResult cap = enforce_sf_cap(sf_, reserves + total_bonus(), pf_.rules.theta);
    sf_ = cap.surplus_fund;
    if (cap.forced_declaration > 0.0) {
      if (alive) {
        attribute(cap.forced_declaration, t);
        declared += cap.forced_declaration;
      } else {
        sf_payout = cap.forced_declaration;
      }
    }
    cf_discretionary += sf_payout;
    cash_ -= split.shareholder + split.tax + sf_payout;

    if (alive && cash_ > 0.0) reinvest(t);

    // Balance sheet after the step.
    double asset_book = cash_;
    double mv = cash_;
    for (const auto& b : bonds_) {
      asset_book += b.book;
      mv += b.market;
    }
    for (const auto& q : equities_) {
      asset_book += q.book;
      mv += q.market;
    }
    const double bv = reserves + total_bonus() + sf_;
    if (std::abs(asset_book - bv) > 1e-9 * std::max(1.0, ledger_.bv0)) {
      throw NumericalError("scenario " + std::to_string(i_) + ", year " + std::to_string(t) +
                           ": asset book value " + std::to_string(asset_book) +
                           " departs from liability book value " + std::to_string(bv));
    }

    e.cf_guaranteed = cf_guaranteed;
    e.cf_discretionary = cf_discretionary;
    if (opts_.drop_cashflow_year && *opts_.drop_cashflow_year == t) {
      ledger_.dropped[i_] = cf_guaranteed;
      e.cf_guaranteed = 0.0;
    }
    e.sh = split.shareholder;
    e.tax = split.tax;
    e.ph = split.policyholder;
    e.gs = gs;
    e.declared = declared;
    e.roa = roa;
    e.ur = unexpected_return(roa, F, bv_prev_);
    e.bv = bv;
    e.mv = mv;
    e.ug = mv - bv;
    e.sf = sf_;
    e.reserves = reserves + total_bonus();
    bv_prev_ = bv;
  }

  double total_bonus() const {
    double s = 0.0;
    for (double b : bonus_) s += b;
    return s;
  }

  double saleable_market_value() const {
    double v = 0.0;
    for (const auto& b : bonds_) v += b.market;
    for (const auto& q : equities_) v += q.market;
    return v;
  }

  double positive_unrealized_gains() const {
    double g = 0.0;
    for (const auto& b : bonds_) g += std::max(b.market - b.book, 0.0);
    for (const auto& q : equities_) g += std::max(q.market - q.book, 0.0);
    return g;
  }

  // Sells fraction f of every position; returns realized gain (can be negative).
  double sell_fraction(double f, int /*t*/) {
    f = std::clamp(f, 0.0, 1.0);
    double realized = 0.0;
    for (auto& b : bonds_) {
      realized += f * (b.market - b.book);
      cash_ += f * b.market;
      b.scale(1.0 - f);
    }
    for (auto& q : equities_) {
      realized += f * (q.market - q.book);
      cash_ += f * q.market;
      q.scale(1.0 - f);
    }
    if (f >= 1.0) {
      bonds_.clear();
      equities_.clear();
    }
    return realized;
  }

  // Sells fraction f of every position standing at a gain.
  double realize_gains(double f) {
    double realized = 0.0;
    for (auto& b : bonds_) {
      if (b.market > b.book) {
        realized += f * (b.market - b.book);
        cash_ += f * b.market;
        b.scale(1.0 - f);
      }
    }
    for (auto& q : equities_) {
      if (q.market > q.book) {
        realized += f * (q.market - q.book);
        cash_ += f * q.market;
        q.scale(1.0 - f);
      }
    }
    return realized;
  }

  // Credits an amount to the bonus accounts of contracts in force, pro rata to reserves.
  void attribute(double amount, int t) {
    if (amount == 0.0) return;
    double weight_total = 0.0;
    std::size_t in_force = 0;
    for (const auto& k : pf_.contracts) {
      if (k.maturity > t) {
        weight_total += k.reserve(t);
        ++in_force;
      }
    }
    const std::size_t n_contracts = pf_.contracts.size();
    for (std::size_t c = 0; c < n_contracts; ++c) {
      const Contract& k = pf_.contracts[c];
      if (k.maturity <= t) continue;
      const double w = weight_total > 0.0 ? k.reserve(t) / weight_total : 1.0 / static_cast<double>(in_force);
      bonus_[c] += amount * w;
      ledger_.payouts[i_ * n_contracts + c].attributed += amount * w;
    }
  }

  void reinvest(int t) {
    const int term = std::min(pf_.rules.reinvestment_term, last_maturity_ - t);
    if (term < 1) return;
    double annuity = 0.0;
    for (int k = 1; k <= term; ++k) annuity += sc_.bond_price(i_, t, t + k);
    const double coupon = (1.0 - sc_.bond_price(i_, t, t + term)) / annuity;
    BondPosition b{cash_, coupon, t + term, t, cash_, cash_, cash_};
    bonds_.push_back(b);
    cash_ = 0.0;
  }

  const ScenarioSet& sc_;
  const Portfolio& pf_;
  std::size_t i_;
  int horizon_;
  const ProjectionOptions& opts_;
  CashflowLedger& ledger_;
  int last_maturity_;

  std::vector<BondPosition> bonds_;
  std::vector<EquityPosition> equities_;
  std::vector<double> bonus_;
  double cash_ = 0.0;
  double sf_ = 0.0;
  double bv_prev_ = 0.0;
};

}  // namespace detail

// Market value at t = 0 of the portfolio's assets on the initial curve.
inline double initial_market_value(const Portfolio& pf, const DiscountCurve& curve) {
  double mv = 0.0;
  for (const auto& a : pf.assets) {
    switch (a.kind) {
      case AssetKind::bond: {
        double v = 0.0;
        for (int k = 1; k <= a.maturity; ++k) v += a.coupon * a.face * curve.factor(k);
        mv += v + a.face * curve.factor(a.maturity);
        break;
      }
      case AssetKind::equity:
      case AssetKind::cash:
        mv += a.market_value;
        break;
    }
  }
  return mv;
}

inline int projection_horizon(const Portfolio& pf, const ProjectionOptions& opts) {
  if (opts.horizon > 0) return opts.horizon;
  if (pf.horizon > 0) return pf.horizon;
  return pf.last_maturity();
}

inline CashflowLedger project(const ScenarioSet& scenarios, const Portfolio& portfolio,
                              const ProjectionOptions& options = {}) {
  portfolio.validate();
  const int T = projection_horizon(portfolio, options);
  if (T > scenarios.horizon()) {
    throw InputError("projection horizon " + std::to_string(T) + " exceeds scenario horizon " +
                     std::to_string(scenarios.horizon()));
  }
  const GaussianShortRate& model = scenarios.model();
  if (portfolio.last_maturity() > model.horizon()) {
    throw InputError("contract maturities exceed the curve horizon");
  }
  for (const auto& a : portfolio.assets) {
    if (a.kind == AssetKind::bond && a.maturity > model.horizon()) {
      throw InputError("bond " + a.id + " matures beyond the curve horizon");
    }
  }

  CashflowLedger ledger;
  ledger.scenarios = scenarios.size();
  ledger.horizon = T;
  ledger.block_size = scenarios.block_size();
  ledger.bv0 = portfolio.reserve(0) + portfolio.surplus_fund;
  ledger.mv0 = initial_market_value(portfolio, model.curve());
  ledger.sf0 = portfolio.surplus_fund;
  for (const auto& c : portfolio.contracts) ledger.contract_ids.push_back(c.id);
  ledger.entries.assign(scenarios.size() * static_cast<std::size_t>(T), LedgerEntry{});
  ledger.payouts.assign(scenarios.size() * portfolio.contracts.size(), ContractPayout{});
  ledger.dropped.assign(scenarios.size(), 0.0);
  ledger.dropped_year = options.drop_cashflow_year;

  parallel_for(scenarios.size(), options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      detail::ScenarioProjection(scenarios, portfolio, i, T, options, ledger).run();
    }
  });
  return ledger;
}

// Conservation residual of year t: BV_t - BV_{t-1} + cf_t + sh_t + tax_t - roa_t.
inline double conservation_residual(const CashflowLedger& ledger, std::size_t i, int t) {
  const LedgerEntry& e = ledger.entry(i, t);
  const double bv_prev = t == 1 ? ledger.bv0 : ledger.entry(i, t - 1).bv;
  return e.bv - bv_prev + e.cf_guaranteed + e.cf_discretionary + e.sh + e.tax - e.roa;
}

}  // namespace wplab
