#pragma once

// Risk-neutral interest-rate scenarios on the annual grid.
//
// The one-year log rate is y_t = phi_t + x_t with a zero-started Gaussian AR(1) factor
// x_{t+1} = a x_t + sigma eps_{t+1}, a = exp(-mean_reversion). The deterministic shift phi is
// fitted so that E[B_t^{-1}] = P(0,t) exactly, and zero-coupon prices P(t,s) are the exact
// conditional expectations under the same law, so B_t^{-1} P(t,s) is a martingale on the grid.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "wplab/curve.hpp"
#include "wplab/errors.hpp"
#include "wplab/parallel.hpp"

namespace wplab {

struct RateModelParams {
  double mean_reversion = 0.1;  // per annum
  double volatility = 0.005;    // per annum, one-year log-rate shock

  void validate() const {
    if (!(mean_reversion > 0.0)) throw InputError("mean reversion must be > 0");
    if (!(volatility >= 0.0)) throw InputError("volatility must be >= 0");
  }
};

class GaussianShortRate {
 public:
  GaussianShortRate(DiscountCurve curve, RateModelParams params)
      : curve_(std::move(curve)), params_(params) {
    params_.validate();
    const int h = curve_.horizon();
    decay_ = std::exp(-params_.mean_reversion);
    loading_.assign(static_cast<std::size_t>(h) + 1, 0.0);
    variance_.assign(static_cast<std::size_t>(h) + 1, 0.0);
    for (int n = 1; n <= h; ++n) {
      loading_[n] = (1.0 - std::pow(decay_, n)) / (1.0 - decay_);
    }
    const double s2 = params_.volatility * params_.volatility;
    for (int n = 2; n <= h; ++n) {
      variance_[n] = variance_[n - 1] + s2 * loading_[n - 1] * loading_[n - 1];
    }
  }

  const DiscountCurve& curve() const noexcept { return curve_; }
  const RateModelParams& params() const noexcept { return params_; }
  int horizon() const noexcept { return curve_.horizon(); }

  // Variance of sum_{u=t}^{t+n-1} x_u given x_t.
  double integrated_variance(int n) const { return variance_.at(static_cast<std::size_t>(n)); }

  double next_state(double x, double eps) const { return decay_ * x + params_.volatility * eps; }

  // Simple forward F_t for (t, t+1] given the factor x_t.
  double forward(int t, double x) const {
    const double ratio = curve_.factor(t) / curve_.factor(t + 1);
    return ratio * std::exp(x + 0.5 * (variance_[t + 1] - variance_[t])) - 1.0;
  }

  // Zero-coupon price P(t,s) given x_t.
  double bond_price(int t, int s, double x) const {
    if (s < t) throw std::out_of_range("bond maturity before valuation date");
    if (s == t) return 1.0;
    const int n = s - t;
    const double log_adj = -0.5 * (variance_[s] - variance_[t]) + 0.5 * variance_[n] - x * loading_[n];
    return curve_.factor(s) / curve_.factor(t) * std::exp(log_adj);
  }

 private:
  DiscountCurve curve_;
  RateModelParams params_;
  double decay_ = 0.0;
  std::vector<double> loading_;   // (1 - a^n) / (1 - a)
  std::vector<double> variance_;  // integrated factor variance over n years
};

struct GenerationOptions {
  bool antithetic = true;
  unsigned threads = 0;  // 0: hardware concurrency
};

// Per-scenario paths for years 0..T. Immutable after construction.
class ScenarioSet {
 public:
  std::size_t size() const noexcept { return n_; }
  int horizon() const noexcept { return horizon_; }
  std::uint64_t seed() const noexcept { return seed_; }
  bool antithetic() const noexcept { return antithetic_; }
  std::size_t block_size() const noexcept { return antithetic_ ? 2 : 1; }
  bool has_model() const noexcept { return model_.has_value(); }
  const GaussianShortRate& model() const {
    if (!model_) throw InputError("scenario set carries no term-structure model (imported paths)");
    return *model_;
  }

  // F_{t-1}(w), t = 1..T
  double forward(std::size_t i, int t) const { return forward_[i * horizon_ + (t - 1)]; }
  // B_t(w)^{-1}, t = 0..T
  double deflator(std::size_t i, int t) const { return deflator_[i * (horizon_ + 1) + t]; }
  double bank_account(std::size_t i, int t) const { return 1.0 / deflator(i, t); }
  // Gaussian factor x_t(w), t = 0..T
  double state(std::size_t i, int t) const { return state_[i * (horizon_ + 1) + t]; }
  // Standard normal equity innovation for year t, t = 1..T
  double equity_shock(std::size_t i, int t) const { return equity_[i * horizon_ + (t - 1)]; }
  double rate_shock(std::size_t i, int t) const { return rate_eps_[i * horizon_ + (t - 1)]; }

  double bond_price(std::size_t i, int t, int s) const { return model().bond_price(t, s, state(i, t)); }

  // Paths given directly as forwards (imported or synthetic). Equity shocks default to 0.
  static ScenarioSet from_forwards(std::size_t n, int horizon, std::span<const double> forwards,
                                   std::span<const double> equity_shocks = {}) {
    if (n == 0) throw InputError("scenario set must contain at least one scenario");
    if (horizon < 1) throw InputError("scenario horizon must be >= 1");
    const std::size_t cells = n * static_cast<std::size_t>(horizon);
    if (forwards.size() != cells) throw InputError("forward matrix has wrong size");
    if (!equity_shocks.empty() && equity_shocks.size() != cells) {
      throw InputError("equity shock matrix has wrong size");
    }
    ScenarioSet s;
    s.allocate(n, horizon);
    std::copy(forwards.begin(), forwards.end(), s.forward_.begin());
    if (!equity_shocks.empty()) std::copy(equity_shocks.begin(), equity_shocks.end(), s.equity_.begin());
    for (std::size_t i = 0; i < n; ++i) {
      double d = 1.0;
      s.deflator_[i * (horizon + 1)] = 1.0;
      for (int t = 1; t <= horizon; ++t) {
        const double f = s.forward(i, t);
        if (!(1.0 + f > 0.0)) throw InputError("imported forward violates 1 + F > 0");
        d /= 1.0 + f;
        s.deflator_[i * (horizon + 1) + t] = d;
      }
    }
    return s;
  }

  friend ScenarioSet generate(const DiscountCurve&, const RateModelParams&, std::size_t, std::uint64_t,
                              int, const GenerationOptions&);

 private:
  void allocate(std::size_t n, int horizon) {
    n_ = n;
    horizon_ = horizon;
    const std::size_t cells = n * static_cast<std::size_t>(horizon);
    forward_.assign(cells, 0.0);
    equity_.assign(cells, 0.0);
    rate_eps_.assign(cells, 0.0);
    deflator_.assign(n * (static_cast<std::size_t>(horizon) + 1), 1.0);
    state_.assign(n * (static_cast<std::size_t>(horizon) + 1), 0.0);
  }

  std::size_t n_ = 0;
  int horizon_ = 0;
  std::uint64_t seed_ = 0;
  bool antithetic_ = false;
  std::optional<GaussianShortRate> model_;
  std::vector<double> forward_, deflator_, state_, equity_, rate_eps_;
};

// `horizon` = 0 uses the full curve horizon.
inline ScenarioSet generate(const DiscountCurve& curve, const RateModelParams& params, std::size_t n,
                            std::uint64_t seed, int horizon = 0,
                            const GenerationOptions& options = {}) {
  if (n == 0) throw InputError("scenario count must be >= 1");
  if (horizon == 0) horizon = curve.horizon();
  if (horizon < 1) throw InputError("scenario horizon must be >= 1");
  if (horizon > curve.horizon()) {
    throw InputError("curve horizon " + std::to_string(curve.horizon()) +
                     " is shorter than requested scenario horizon " + std::to_string(horizon));
  }
  ScenarioSet s;
  s.allocate(n, horizon);
  s.seed_ = seed;
  s.antithetic_ = options.antithetic;
  s.model_.emplace(curve, params);
  const GaussianShortRate& model = *s.model_;

  const std::size_t block = options.antithetic ? 2 : 1;
  const std::size_t blocks = (n + block - 1) / block;
  const std::size_t T = static_cast<std::size_t>(horizon);

  parallel_for(blocks, options.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> rate_eps(T), eq_eps(T);
    for (std::size_t b = begin; b < end; ++b) {
      // One independent stream per block, keyed by (seed, block index).
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> normal(0.0, 1.0);
      for (std::size_t t = 0; t < T; ++t) {
        rate_eps[t] = normal(rng);
        eq_eps[t] = normal(rng);
      }
      for (std::size_t k = 0; k < block; ++k) {
        const std::size_t i = b * block + k;
        if (i >= n) break;
        const double sign = k == 0 ? 1.0 : -1.0;
        double x = 0.0;
        double d = 1.0;
        s.state_[i * (T + 1)] = 0.0;
        s.deflator_[i * (T + 1)] = 1.0;
        for (int t = 1; t <= horizon; ++t) {
          const double f = model.forward(t - 1, x);
          s.forward_[i * T + (t - 1)] = f;
          d /= 1.0 + f;
          s.deflator_[i * (T + 1) + t] = d;
          const double eps = sign * rate_eps[t - 1];
          s.rate_eps_[i * T + (t - 1)] = eps;
          s.equity_[i * T + (t - 1)] = sign * eq_eps[t - 1];
          x = model.next_state(x, eps);
          s.state_[i * (T + 1) + t] = x;
        }
      }
    }
  });
  return s;
}

struct MartingaleDiagnostics {
  std::vector<double> mean_deflator;   // index t-1
  std::vector<double> relative_error;  // |mean - P(0,t)| / P(0,t), index t-1
  double max_error = 0.0;
  int worst_tenor = 0;
  double tolerance = 5e-3;
  bool pass = false;
};

inline MartingaleDiagnostics martingale_test(const ScenarioSet& scenarios, const DiscountCurve& curve,
                                             double tolerance = 5e-3) {
  if (scenarios.size() == 0) throw InputError("martingale test on an empty scenario set");
  if (scenarios.horizon() > curve.horizon()) {
    throw InputError("scenario horizon exceeds curve horizon");
  }
  MartingaleDiagnostics diag;
  diag.tolerance = tolerance;
  std::vector<double> column(scenarios.size());
  for (int t = 1; t <= scenarios.horizon(); ++t) {
    for (std::size_t i = 0; i < scenarios.size(); ++i) column[i] = scenarios.deflator(i, t);
    const double mean = stable_mean(column);
    const double p = curve.factor(t);
    const double err = std::abs(mean - p) / p;
    diag.mean_deflator.push_back(mean);
    diag.relative_error.push_back(err);
    if (err > diag.max_error || diag.worst_tenor == 0) {
      diag.max_error = err;
      diag.worst_tenor = t;
    }
  }
  diag.pass = diag.max_error <= tolerance;
  return diag;
}

}  // namespace wplab
