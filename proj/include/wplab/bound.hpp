#pragma once

// Analytic lower bound for future discretionary benefits:
//   eta  = P(0,M) (1 - CoV[B_M^{-1}] CoV[sum ph*]) gph / (1 - gph)
//   D    = eta / (1 + eta), or the reserve-weighted average over contracts
//   LB   = D (A_0 - GB) - SF_0 - F
// with F the cross-financing cap over a geometric run-off of A_0.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "wplab/curve.hpp"
#include "wplab/errors.hpp"

namespace wplab {

// `published` quotes D to whole percent and F to 0.1 before they enter LB, which is how
// the public case-study tables were produced. `exact` carries full precision throughout.
enum class BoundConvention { exact, published };

inline double round_half_up(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

inline double eta(double p0m, double cov_b, double cov_ph, double gph) {
  if (!(gph >= 0.0 && gph < 1.0)) throw InputError("gph must be in [0,1)");
  if (!(p0m > 0.0)) throw InputError("discount factor must be > 0");
  if (!(cov_b >= 0.0 && cov_ph >= 0.0)) throw InputError("coefficients of variation must be >= 0");
  return p0m * (1.0 - cov_b * cov_ph) * gph / (1.0 - gph);
}

inline double depreciation(double eta_value) {
  if (!(eta_value >= 0.0)) throw InputError("eta must be >= 0");
  return eta_value / (1.0 + eta_value);
}

struct ContractDepreciation {
  double a0 = 0.0;  // A_0^x, market value attributed to the contract
  double gb = 0.0;  // GB^x
  double eta = 0.0;
};

// sum_x w_x D_x with w_x = (A_0^x - GB^x) / (A_0 - GB)
inline double weighted_depreciation(std::span<const ContractDepreciation> contracts) {
  double denom = 0.0;
  for (const auto& c : contracts) denom += c.a0 - c.gb;
  if (denom == 0.0 || contracts.empty()) {
    throw InputError("weighted depreciation: A_0 - GB is zero");
  }
  double d = 0.0;
  for (const auto& c : contracts) d += (c.a0 - c.gb) / denom * depreciation(c.eta);
  return d;
}

// Buckets A_0^{x(t)}, t = 1..T (index t-1), halving every `half_life` years; the last bucket
// holds everything not run off before T.
inline std::vector<double> geometric_runoff(double a0, int horizon, double half_life) {
  if (horizon < 1) throw InputError("run-off horizon must be >= 1");
  if (!(half_life > 0.0)) throw InputError("half-life must be > 0");
  std::vector<double> buckets(static_cast<std::size_t>(horizon));
  auto remaining = [&](int s) { return std::exp2(-static_cast<double>(s) / half_life); };
  for (int t = 1; t < horizon; ++t) buckets[t - 1] = (remaining(t - 1) - remaining(t)) * a0;
  buckets[horizon - 1] = remaining(horizon - 1) * a0;
  return buckets;
}

inline double runoff_remaining(double a0, int years, double half_life) {
  return a0 * std::exp2(-static_cast<double>(years) / half_life);
}

struct BucketDetail {
  int t = 0;
  double a0 = 0.0;
  double eta = 0.0;
  double depreciation = 0.0;
  double cross_financing = 0.0;  // C(t) = C_0 (T - t) / T
};

struct CrossFinancing {
  double value = 0.0;
  std::vector<BucketDetail> buckets;
};

// cov_b[t-1] = SD[B_t^{-1}] / P(0,t). With `exact_max_discount` each eta_{x(t)} is divided by
// max_{s<=t} P(0,s) instead of taking that factor as 1.
inline CrossFinancing cross_financing(std::span<const double> buckets, double c0, double gph,
                                      const DiscountCurve& curve, std::span<const double> cov_b,
                                      double cov_ph, bool exact_max_discount = false) {
  const int T = static_cast<int>(buckets.size());
  if (T < 1) throw InputError("cross-financing needs at least one bucket");
  if (curve.horizon() < T) {
    throw InputError("curve horizon " + std::to_string(curve.horizon()) + " shorter than run-off horizon " +
                     std::to_string(T));
  }
  if (static_cast<int>(cov_b.size()) < T) throw InputError("deflator CoV table shorter than run-off horizon");
  if (!(c0 >= 0.0)) throw InputError("C0 must be >= 0");
  CrossFinancing out;
  for (int t = 1; t <= T; ++t) {
    BucketDetail b;
    b.t = t;
    b.a0 = buckets[t - 1];
    b.eta = eta(curve.factor(t), cov_b[t - 1], cov_ph, gph);
    if (exact_max_discount) b.eta /= max_discount_factor(curve, t);
    b.depreciation = depreciation(b.eta);
    b.cross_financing = c0 * static_cast<double>(T - t) / static_cast<double>(T);
    out.value += b.depreciation * b.cross_financing * b.a0;
    out.buckets.push_back(b);
  }
  return out;
}

inline double cross_financing_F(std::span<const double> buckets, double c0, double gph,
                                const DiscountCurve& curve, std::span<const double> cov_b, double cov_ph) {
  return cross_financing(buckets, c0, gph, curve, cov_b, cov_ph).value;
}

// Deflator CoV per tenor 1..T from a spot-rate history.
inline std::vector<double> deflator_cov_table(const SpotRateSeries& series, const DiscountCurve& curve,
                                              int horizon) {
  std::vector<double> cov(static_cast<std::size_t>(horizon));
  for (int t = 1; t <= horizon; ++t) cov[t - 1] = deflator_cov(series, curve, t);
  return cov;
}

struct BoundInputs {
  double book_value = 0.0;        // BV_0
  double unrealized_gains = 0.0;  // UG_0
  double guaranteed = 0.0;        // GB
  double surplus_fund = 0.0;      // SF_0
  double gph = 0.8;
  double cov_ph = 0.05;
  int anchor_maturity = 15;
  double c0 = 0.03;
  int horizon = 60;
  double half_life = 10.0;
  DiscountCurve curve;
  std::vector<double> cov_b;  // per tenor 1..horizon
  bool deduct_surplus_fund = true;
  bool exact_max_discount = false;
  BoundConvention convention = BoundConvention::published;

  double a0() const { return book_value + unrealized_gains; }

  void validate() const {
    if (!(gph >= 0.0 && gph < 1.0)) throw InputError("gph must be in [0,1)");
    if (!(c0 >= 0.0 && c0 < 1.0)) throw InputError("C0 must be in [0,1)");
    if (anchor_maturity < 1 || anchor_maturity > curve.horizon()) {
      throw InputError("anchor maturity outside curve horizon");
    }
    if (horizon < 1 || horizon > curve.horizon()) throw InputError("horizon outside curve horizon");
    if (static_cast<int>(cov_b.size()) < std::max(horizon, anchor_maturity)) {
      throw InputError("deflator CoV table shorter than horizon");
    }
    if (!(half_life > 0.0)) throw InputError("half-life must be > 0");
  }
};

struct LowerBoundResult {
  double eta = 0.0;
  double depreciation = 0.0;  // D as it enters LB1
  double lb1 = 0.0;
  double surplus_deduction = 0.0;
  double cross_financing = 0.0;  // F as it enters LB
  double lb = 0.0;
  std::vector<BucketDetail> buckets;
};

inline LowerBoundResult lower_bound(const BoundInputs& in) {
  in.validate();
  LowerBoundResult r;
  const int M = in.anchor_maturity;
  r.eta = eta(in.curve.factor(M), in.cov_b[M - 1], in.cov_ph, in.gph);
  if (in.exact_max_discount) r.eta /= max_discount_factor(in.curve, M);
  r.depreciation = depreciation(r.eta);
  const auto buckets = geometric_runoff(in.a0(), in.horizon, in.half_life);
  CrossFinancing cf = cross_financing(buckets, in.c0, in.gph, in.curve, in.cov_b, in.cov_ph,
                                      in.exact_max_discount);
  r.cross_financing = cf.value;
  r.buckets = std::move(cf.buckets);
  if (in.convention == BoundConvention::published) {
    r.depreciation = round_half_up(r.depreciation, 2);
    r.cross_financing = round_half_up(r.cross_financing, 1);
  }
  r.lb1 = r.depreciation * (in.a0() - in.guaranteed);
  r.surplus_deduction = in.deduct_surplus_fund ? in.surplus_fund : 0.0;
  r.lb = r.lb1 - r.surplus_deduction - r.cross_financing;
  return r;
}

struct GridCell {
  int maturity = 0;
  double gph = 0.0;
  double c0 = 0.0;
  double lb = 0.0;
  double cross_financing = 0.0;
};

struct SensitivityGrid {
  std::vector<int> maturities;
  std::vector<double> gphs;
  std::vector<double> c0s;
  std::vector<GridCell> cells;  // maturity-major, then c0, then gph

  const GridCell& cell(int maturity, double gph, double c0) const {
    for (const auto& c : cells) {
      if (c.maturity == maturity && std::abs(c.gph - gph) < 1e-12 && std::abs(c.c0 - c0) < 1e-12) return c;
    }
    throw std::out_of_range("no grid cell for the requested combination");
  }
};

inline SensitivityGrid sensitivity_grid(const BoundInputs& base, std::span<const int> maturities,
                                        std::span<const double> gphs, std::span<const double> c0s) {
  if (maturities.empty() || gphs.empty() || c0s.empty()) throw InputError("sensitivity grid axes must be non-empty");
  SensitivityGrid g;
  g.maturities.assign(maturities.begin(), maturities.end());
  g.gphs.assign(gphs.begin(), gphs.end());
  g.c0s.assign(c0s.begin(), c0s.end());
  for (int m : maturities) {
    for (double c0 : c0s) {
      for (double gph : gphs) {
        BoundInputs in = base;
        in.anchor_maturity = m;
        in.gph = gph;
        in.c0 = c0;
        const LowerBoundResult r = lower_bound(in);
        g.cells.push_back({m, gph, c0, r.lb, r.cross_financing});
      }
    }
  }
  return g;
}

}  // namespace wplab
