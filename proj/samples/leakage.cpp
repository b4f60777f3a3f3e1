// Project the bundled two-contract portfolio and check the basic valuation equation.
#include <iostream>

#include "wplab/wplab.hpp"

int main() {
  using namespace wplab;
  const auto file = io::read_portfolio(io::data_dir() / "toy_stochastic.json");
  const DiscountCurve curve = io::read_curve(*file.curve_file);

  const int horizon = projection_horizon(file.portfolio, {});
  const ScenarioSet scenarios = generate(curve, RateModelParams{}, 2000, 42, horizon);
  std::cout << "martingale max error " << martingale_test(scenarios, curve).max_error << '\n';

  const CashflowLedger ledger = project(scenarios, file.portfolio);
  const ValuationResult v = value(ledger, &curve);
  report::validation_report(std::cout, v, leakage_test(v, ledger.bv0, ledger.ug0()));
}
