#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace wplab {

// Compensated sum over the values in ascending order. The result depends only on the
// multiset of values, so it is identical for any permutation of the input and for any
// way the values were produced across worker threads.
inline double stable_sum(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  double carry = 0.0;
  for (double v : sorted) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

inline double stable_mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of an empty sample");
  return stable_sum(values) / static_cast<double>(values.size());
}

// Unbiased (n-1) sample standard deviation.
inline double sample_sd(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("standard deviation needs at least 2 values");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) return 0.0;
  const double m = stable_mean(values);
  std::vector<double> sq(values.size());
  std::transform(values.begin(), values.end(), sq.begin(),
                 [m](double v) { return (v - m) * (v - m); });
  return std::sqrt(stable_sum(sq) / static_cast<double>(values.size() - 1));
}

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Monte Carlo estimate from per-scenario values, where consecutive scenarios are grouped
// into blocks of `block` (2 for antithetic pairs). Each block mean is one observation for
// the standard error; a trailing partial block counts as its own observation.
inline Estimate block_estimate(std::span<const double> per_scenario, std::size_t block) {
  if (per_scenario.empty()) throw std::invalid_argument("estimate from an empty sample");
  if (block == 0) block = 1;
  std::vector<double> obs;
  obs.reserve(per_scenario.size() / block + 1);
  for (std::size_t i = 0; i < per_scenario.size(); i += block) {
    const std::size_t len = std::min(block, per_scenario.size() - i);
    obs.push_back(stable_mean(per_scenario.subspan(i, len)));
  }
  Estimate e;
  e.mean = stable_mean(per_scenario);
  e.std_error = obs.size() > 1 ? sample_sd(obs) / std::sqrt(static_cast<double>(obs.size())) : 0.0;
  return e;
}

}  // namespace wplab
