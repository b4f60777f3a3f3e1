#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "wplab/errors.hpp"

namespace wplab {

// A with-profit contract in run-off. Reserves and guaranteed flows are deterministic
// (decrements already applied).
struct Contract {
  std::string id;
  int maturity = 0;
  double technical_rate = 0.0;
  std::vector<double> reserves;    // TR_x(t), t = 0..maturity, TR_x(maturity) = 0
  std::vector<double> guaranteed;  // cf_x(t), t = 1..maturity, stored at t-1

  double reserve(int t) const {
    if (t < 0 || t > maturity) return 0.0;
    return reserves[static_cast<std::size_t>(t)];
  }
  double guaranteed_flow(int t) const {
    if (t < 1 || t > maturity) return 0.0;
    return guaranteed[static_cast<std::size_t>(t - 1)];
  }

  void validate() const {
    if (maturity < 1) throw InputError("contract " + id + ": maturity must be >= 1");
    if (reserves.size() != static_cast<std::size_t>(maturity) + 1) {
      throw InputError("contract " + id + ": reserve schedule must have maturity+1 entries");
    }
    if (guaranteed.size() != static_cast<std::size_t>(maturity)) {
      throw InputError("contract " + id + ": guaranteed cash flows must have maturity entries");
    }
    if (reserves.back() != 0.0) throw InputError("contract " + id + ": reserve at maturity must be 0");
    for (double r : reserves) {
      if (!(r >= 0.0)) throw InputError("contract " + id + ": reserves must be non-negative");
    }
    for (double c : guaranteed) {
      if (!(c >= 0.0)) throw InputError("contract " + id + ": guaranteed flows must be non-negative");
    }
  }

  // Single guaranteed payment TR_0 (1+i)^M at maturity.
  static Contract pure_endowment(std::string id, double reserve0, double rate, int maturity) {
    Contract c;
    c.id = std::move(id);
    c.maturity = maturity;
    c.technical_rate = rate;
    c.reserves.resize(static_cast<std::size_t>(maturity) + 1);
    c.guaranteed.assign(static_cast<std::size_t>(maturity), 0.0);
    for (int t = 0; t < maturity; ++t) c.reserves[t] = reserve0 * std::pow(1.0 + rate, t);
    c.reserves[maturity] = 0.0;
    c.guaranteed[maturity - 1] = reserve0 * std::pow(1.0 + rate, maturity);
    return c;
  }

  // Level annual payments in arrears exhausting TR_0 at the technical rate.
  static Contract annuity(std::string id, double reserve0, double rate, int maturity) {
    Contract c;
    c.id = std::move(id);
    c.maturity = maturity;
    c.technical_rate = rate;
    const double v = 1.0 / (1.0 + rate);
    double annuity_factor = 0.0;
    for (int k = 1; k <= maturity; ++k) annuity_factor += std::pow(v, k);
    const double payment = reserve0 / annuity_factor;
    c.reserves.resize(static_cast<std::size_t>(maturity) + 1);
    c.guaranteed.assign(static_cast<std::size_t>(maturity), payment);
    c.reserves[0] = reserve0;
    for (int t = 1; t < maturity; ++t) {
      c.reserves[t] = std::max(0.0, c.reserves[t - 1] * (1.0 + rate) - payment);
    }
    c.reserves[maturity] = 0.0;
    return c;
  }
};

enum class AssetKind { bond, equity, cash };

struct Asset {
  std::string id;
  AssetKind kind = AssetKind::bond;
  // bonds
  double face = 0.0;
  double coupon = 0.0;  // annual coupon rate on face
  int maturity = 0;     // years from now
  // all kinds; cash has book = market
  double book_value = 0.0;
  // equity and cash
  double market_value = 0.0;
  double dividend_yield = 0.0;
  double volatility = 0.0;

  void validate() const {
    switch (kind) {
      case AssetKind::bond:
        if (maturity < 1) throw InputError("bond " + id + ": maturity must be >= 1");
        if (!(face > 0.0)) throw InputError("bond " + id + ": face must be > 0");
        if (!(book_value > 0.0)) throw InputError("bond " + id + ": book value must be > 0");
        break;
      case AssetKind::equity:
        if (!(market_value > 0.0) || !(book_value > 0.0)) {
          throw InputError("equity " + id + ": market and book value must be > 0");
        }
        if (!(dividend_yield >= 0.0 && dividend_yield < 1.0)) {
          throw InputError("equity " + id + ": dividend yield must be in [0,1)");
        }
        if (!(volatility >= 0.0)) throw InputError("equity " + id + ": volatility must be >= 0");
        break;
      case AssetKind::cash:
        break;
    }
  }
};

enum class ReinvestmentRule { par_bond };
enum class RealizationRule { pro_rata_shortfall, none };

struct ManagementRules {
  double gph = 0.8;        // gross policyholder participation
  double tax_rate = 0.25;
  double theta = 0.1;      // surplus fund cap as a fraction of policyholder reserves
  double smoothing = 0.5;  // fraction of the surplus fund declared to contracts each year
  int reinvestment_term = 10;
  ReinvestmentRule reinvestment = ReinvestmentRule::par_bond;
  RealizationRule realization = RealizationRule::pro_rata_shortfall;

  void validate() const {
    if (!(gph >= 0.0 && gph < 1.0)) throw InputError("gph must be in [0,1)");
    if (!(tax_rate >= 0.0 && tax_rate < 1.0)) throw InputError("tax rate must be in [0,1)");
    if (!(theta > 0.0)) throw InputError("surplus fund cap theta must be > 0");
    if (!(smoothing >= 0.0 && smoothing <= 1.0)) throw InputError("smoothing must be in [0,1]");
    if (reinvestment_term < 1) throw InputError("reinvestment term must be >= 1");
  }
};

struct Portfolio {
  std::vector<Contract> contracts;
  std::vector<Asset> assets;
  ManagementRules rules;
  double surplus_fund = 0.0;
  int horizon = 0;  // 0: run to the last contract maturity

  int last_maturity() const {
    int m = 0;
    for (const auto& c : contracts) m = std::max(m, c.maturity);
    return m;
  }
  double reserve(int t) const {
    return std::accumulate(contracts.begin(), contracts.end(), 0.0,
                           [t](double s, const Contract& c) { return s + c.reserve(t); });
  }
  double asset_book_value() const {
    return std::accumulate(assets.begin(), assets.end(), 0.0, [](double s, const Asset& a) {
      return s + (a.kind == AssetKind::cash ? a.market_value : a.book_value);
    });
  }

  void validate() const {
    if (contracts.empty()) throw InputError("portfolio has no contracts");
    for (const auto& c : contracts) c.validate();
    for (const auto& a : assets) a.validate();
    rules.validate();
    if (!(surplus_fund >= 0.0)) throw InputError("surplus fund must be >= 0");
    if (horizon < 0) throw InputError("horizon must be >= 0");
    const double liabilities = reserve(0) + surplus_fund;
    const double books = asset_book_value();
    if (std::abs(books - liabilities) > 1e-9 * std::max(1.0, liabilities)) {
      throw InputError("statutory balance sheet carries equity: asset book value " + std::to_string(books) +
                       " differs from liability book value " + std::to_string(liabilities));
    }
  }
};

}  // namespace wplab
