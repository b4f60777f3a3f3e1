#pragma once

#include <stdexcept>
#include <string>

namespace wplab {

// Malformed or out-of-contract input: bad files, rejected parameters.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation that cannot produce a meaningful result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Run-off projection ran out of assets before the liabilities were settled.
class InsolvencyError : public NumericalError {
 public:
  InsolvencyError(std::size_t scenario, int year, const std::string& what)
      : NumericalError("scenario " + std::to_string(scenario) + ", year " + std::to_string(year) +
                       ": " + what),
        scenario_(scenario),
        year_(year) {}

  std::size_t scenario() const noexcept { return scenario_; }
  int year() const noexcept { return year_; }

 private:
  std::size_t scenario_;
  int year_;
};

}  // namespace wplab
