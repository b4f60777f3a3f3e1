// Lower bound for the future discretionary benefits from public balance-sheet figures.
#include <iostream>

#include "wplab/wplab.hpp"

int main() {
  using namespace wplab;
  io::BoundFile f = io::read_bound_inputs(io::data_dir() / "allianz_leben_2017.json");
  report::bound_report(std::cout, f.inputs, lower_bound(f.inputs), f.reported_fdb);

  f.inputs.convention = BoundConvention::exact;
  std::cout << "\nunrounded LB: " << lower_bound(f.inputs).lb << '\n';
}
