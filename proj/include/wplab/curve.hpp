#pragma once

// Initial risk-free term structure on the annual grid, the forwards and deterministic bank
// account implied by it, and the dispersion of deflators estimated from a spot-rate history.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "wplab/errors.hpp"
#include "wplab/stats.hpp"

namespace wplab {

// Discount factors P(0,t) for t = 1..T. P(0,0) = 1 is implicit.
class DiscountCurve {
 public:
  DiscountCurve() = default;

  explicit DiscountCurve(std::vector<double> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw InputError("discount curve needs at least one tenor");
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (!(factors_[i] > 0.0) || !std::isfinite(factors_[i])) {
        throw InputError("discount factor at tenor " + std::to_string(i + 1) +
                         " must be strictly positive");
      }
    }
  }

  static DiscountCurve flat(double annual_rate, int horizon) {
    std::vector<double> f(static_cast<std::size_t>(horizon));
    for (int t = 1; t <= horizon; ++t) f[t - 1] = std::pow(1.0 + annual_rate, -t);
    return DiscountCurve(std::move(f));
  }

  int horizon() const noexcept { return static_cast<int>(factors_.size()); }

  // P(0,t); t = 0 gives 1.
  double factor(int t) const {
    if (t == 0) return 1.0;
    if (t < 0 || t > horizon()) {
      throw std::out_of_range("tenor " + std::to_string(t) + " outside curve horizon 1.." +
                              std::to_string(horizon()));
    }
    return factors_[static_cast<std::size_t>(t - 1)];
  }

  std::span<const double> factors() const noexcept { return factors_; }

 private:
  std::vector<double> factors_;
};

// Simple one-year forwards F_{t-1}, t = 1..T, stored at index t-1.
class ForwardCurve {
 public:
  ForwardCurve() = default;
  explicit ForwardCurve(std::vector<double> forwards) : forwards_(std::move(forwards)) {
    for (double f : forwards_) {
      if (!(1.0 + f > 0.0)) throw InputError("forward rate must satisfy 1 + F > 0");
    }
  }

  int horizon() const noexcept { return static_cast<int>(forwards_.size()); }

  // Forward from t-1 to t.
  double forward(int t) const { return forwards_.at(static_cast<std::size_t>(t - 1)); }

  // Roll-over bank account B_t = prod_{s<=t} (1 + F_{s-1}), B_0 = 1.
  double bank_account(int t) const {
    double b = 1.0;
    for (int s = 1; s <= t; ++s) b *= 1.0 + forward(s);
    return b;
  }

  std::span<const double> forwards() const noexcept { return forwards_; }

 private:
  std::vector<double> forwards_;
};

struct SpotRateSeries {
  std::vector<std::string> dates;
  std::vector<double> rates;  // annually compounded, decimal
  int tenor = 15;
};

inline ForwardCurve bootstrap_forwards(const DiscountCurve& curve) {
  std::vector<double> f(static_cast<std::size_t>(curve.horizon()));
  for (int t = 1; t <= curve.horizon(); ++t) {
    f[t - 1] = curve.factor(t - 1) / curve.factor(t) - 1.0;
  }
  return ForwardCurve(std::move(f));
}

inline double deterministic_deflator(const DiscountCurve& curve, int t) {
  if (t < 1 || t > curve.horizon()) {
    throw std::out_of_range("deflator year " + std::to_string(t) + " outside 1.." +
                            std::to_string(curve.horizon()));
  }
  return curve.factor(t);
}

// max_{1<=t<=M} P(0,t)
inline double max_discount_factor(const DiscountCurve& curve, int M) {
  if (M < 1 || M > curve.horizon()) {
    throw std::out_of_range("maturity " + std::to_string(M) + " outside 1.." +
                            std::to_string(curve.horizon()));
  }
  const auto f = curve.factors().first(static_cast<std::size_t>(M));
  return *std::max_element(f.begin(), f.end());
}

// Coefficient of variation SD[B_t^{-1}] / E[B_t^{-1}] of the deflator at maturity t.
//
// At the series tenor this is the sample CoV of (1+r)^{-t} over the observations. Other
// maturities use the flat-volatility duration rule t * SD[r] / (1 + mean[r]).
inline double deflator_cov(const SpotRateSeries& series, const DiscountCurve& curve, int t) {
  if (series.rates.size() < 2) throw InputError("spot-rate series needs at least 2 observations");
  if (series.tenor < 1) throw InputError("spot-rate series tenor must be >= 1");
  if (t < 1 || t > curve.horizon()) {
    throw std::out_of_range("maturity " + std::to_string(t) + " outside curve horizon");
  }
  if (t == series.tenor) {
    std::vector<double> deflators(series.rates.size());
    std::transform(series.rates.begin(), series.rates.end(), deflators.begin(),
                   [t](double r) { return std::pow(1.0 + r, -t); });
    return sample_sd(deflators) / stable_mean(deflators);
  }
  return static_cast<double>(t) * sample_sd(series.rates) / (1.0 + stable_mean(series.rates));
}

}  // namespace wplab
