#pragma once

// Command-line front end. `run` is the whole program minus process plumbing, so it can be
// driven in-process by tests.
//
// Exit codes: 0 pass, 2 leakage test failed, 3 input error, 4 martingale or other numerical
// failure, 5 insolvent scenario.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wplab/wplab.hpp"

namespace wplab::cli {

enum exit_code : int { ok = 0, validation_failed = 2, input_error = 3, numerical_failure = 4, insolvent = 5 };

struct ModelOptions {
  std::string curve;
  std::size_t scenarios = 1000;
  std::uint64_t seed = 20171231;
  double volatility = 0.005;
  double mean_reversion = 0.1;
  bool no_antithetic = false;
  unsigned threads = 0;
  double martingale_tolerance = 5e-3;
};

struct BoundOverrides {
  std::string inputs = "allianz_leben_2017.json";
  std::optional<double> gph, c0, cov_ph;
  std::optional<int> maturity;
  std::string convention;
  bool exact_max_discount = false;
  bool no_sf_deduction = false;
};

// Existing path as given, else relative to the data directory.
inline std::filesystem::path resolve_input(const std::string& name) {
  const std::filesystem::path p(name);
  if (std::filesystem::exists(p) || p.is_absolute()) return p;
  const auto in_data = io::data_dir() / p;
  if (std::filesystem::exists(in_data)) return in_data;
  return p;
}

// "t=3" or "3"
inline int parse_drop_year(const std::string& text) {
  std::string s = text;
  if (s.rfind("t=", 0) == 0) s = s.substr(2);
  try {
    std::size_t used = 0;
    const int t = std::stoi(s, &used);
    if (used != s.size() || t < 1) throw std::invalid_argument(s);
    return t;
  } catch (const std::exception&) {
    throw InputError("--drop-cashflow expects t=<year> with year >= 1, got '" + text + "'");
  }
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

inline void add_model_options(CLI::App* cmd, ModelOptions& m) {
  cmd->add_option("--curve", m.curve, "discount curve CSV (tenor,discount_factor)");
  cmd->add_option("--scenarios", m.scenarios, "number of scenarios")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", m.seed, "random seed");
  cmd->add_option("--vol", m.volatility, "short-rate volatility")->check(CLI::NonNegativeNumber);
  cmd->add_option("--mean-reversion", m.mean_reversion, "short-rate mean reversion")->check(CLI::PositiveNumber);
  cmd->add_flag("--no-antithetic", m.no_antithetic, "disable antithetic pairs");
  cmd->add_option("--threads", m.threads, "worker threads (0: all cores)");
  cmd->add_option("--martingale-tolerance", m.martingale_tolerance, "max relative deflator error")
      ->check(CLI::PositiveNumber);
}

inline void add_bound_options(CLI::App* cmd, BoundOverrides& b) {
  cmd->add_option("--inputs", b.inputs, "bound input JSON");
  cmd->add_option("--gph", b.gph, "gross policyholder participation");
  cmd->add_option("--C0", b.c0, "cross-financing rate C0");
  cmd->add_option("--M", b.maturity, "anchor maturity for the depreciation factor");
  cmd->add_option("--cov-ph", b.cov_ph, "coefficient of variation of declared surplus");
  cmd->add_option("--convention", b.convention, "published or exact")
      ->check(CLI::IsMember({"published", "exact"}));
  cmd->add_flag("--exact-max-discount", b.exact_max_discount, "divide eta by max_t P(0,t)");
  cmd->add_flag("--no-sf-deduction", b.no_sf_deduction, "do not deduct the surplus fund");
}

inline io::BoundFile load_bound(const BoundOverrides& b) {
  io::BoundFile f = io::read_bound_inputs(resolve_input(b.inputs));
  if (b.gph) f.inputs.gph = *b.gph;
  if (b.c0) f.inputs.c0 = *b.c0;
  if (b.cov_ph) f.inputs.cov_ph = *b.cov_ph;
  if (b.maturity) f.inputs.anchor_maturity = *b.maturity;
  if (!b.convention.empty()) f.inputs.convention = io::parse_convention(b.convention);
  if (b.exact_max_discount) f.inputs.exact_max_discount = true;
  if (b.no_sf_deduction) f.inputs.deduct_surplus_fund = false;
  f.inputs.validate();
  return f;
}

inline DiscountCurve load_curve(const std::string& requested, const std::optional<std::filesystem::path>& fallback) {
  if (!requested.empty()) return io::read_curve(resolve_input(requested));
  if (fallback) return io::read_curve(*fallback);
  return io::read_curve(io::data_dir() / "eur_discount_2017.csv");
}

inline ScenarioSet make_scenarios(const ModelOptions& m, const DiscountCurve& curve, int horizon) {
  RateModelParams params{m.mean_reversion, m.volatility};
  GenerationOptions g;
  g.antithetic = !m.no_antithetic;
  g.threads = m.threads;
  return generate(curve, params, m.scenarios, m.seed, horizon, g);
}

inline void print_grids(std::ostream& out, const BoundInputs& base, bool csv) {
  const std::vector<int> ms{15, 10, 20};
  const std::vector<double> gphs{0.75, 0.80, 0.85};
  const std::vector<double> c0s{0.01, 0.03, 0.05};
  const SensitivityGrid g = sensitivity_grid(base, ms, gphs, c0s);
  if (csv) {
    report::grid_csv(out, g);
    return;
  }
  for (int m : ms) {
    report::grid_table(out, g, m);
    out << '\n';
  }
  report::cross_financing_table(out, g, base.anchor_maturity);
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"with-profit valuation lab: scenarios, run-off projection, leakage test, FDB lower bound"};
  app.set_config("--config", "", "configuration file (flags override it)");
  app.require_subcommand(1);
  std::string data_dir;
  app.add_option("--data-dir", data_dir, "directory with bundled datasets (default $WPLAB_DATA_DIR)");
  std::string out_path;
  app.add_option("--out", out_path, "write the report to a file instead of stdout");

  ModelOptions model;
  BoundOverrides bound;

  auto* curve_cmd = app.add_subcommand("curve", "forwards, bank account, max discount factor, deflator CoV");
  std::string curve_file, spot_file;
  int spot_tenor = 15;
  curve_cmd->add_option("--curve", curve_file, "discount curve CSV");
  curve_cmd->add_option("--spot", spot_file, "spot-rate history CSV (date,rate)");
  curve_cmd->add_option("--spot-tenor", spot_tenor, "tenor of the spot-rate history");

  auto* scen_cmd = app.add_subcommand("scenarios", "generate scenarios and run the martingale test");
  add_model_options(scen_cmd, model);
  int scen_horizon = 0;
  std::string scen_csv;
  scen_cmd->add_option("--horizon", scen_horizon, "years to simulate (0: curve horizon)");
  scen_cmd->add_option("--csv", scen_csv, "dump scenario,year,forward,deflator");

  auto* val_cmd = app.add_subcommand("validate", "project a portfolio and run the leakage test");
  add_model_options(val_cmd, model);
  std::string portfolio_file = "toy_stochastic.json";
  double tolerance = 1e-3;
  std::string drop, ledger_csv;
  bool json = false;
  val_cmd->add_option("--portfolio", portfolio_file, "portfolio JSON");
  val_cmd->add_option("--tolerance", tolerance, "max relative leakage residual")->check(CLI::PositiveNumber);
  val_cmd->add_option("--drop-cashflow", drop, "fault injection: omit the guaranteed flow of year t (t=3)");
  val_cmd->add_option("--ledger", ledger_csv, "write the cash-flow ledger CSV");
  val_cmd->add_flag("--json", json, "JSON report");

  auto* bound_cmd = app.add_subcommand("bound", "FDB lower bound with sensitivity tables");
  add_bound_options(bound_cmd, bound);

  auto* grid_cmd = app.add_subcommand("grid", "lower-bound sensitivity grid over M, gph and C0");
  add_bound_options(grid_cmd, bound);
  bool grid_csv = false;
  grid_cmd->add_flag("--csv", grid_csv, "CSV instead of aligned tables");

  auto* report_cmd = app.add_subcommand("report", "curve, lower bound and leakage test in one report");
  add_model_options(report_cmd, model);
  add_bound_options(report_cmd, bound);
  report_cmd->add_option("--portfolio", portfolio_file, "portfolio JSON");
  report_cmd->add_option("--tolerance", tolerance, "max relative leakage residual")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::ok : exit_code::input_error;
  }

  if (!data_dir.empty()) setenv("WPLAB_DATA_DIR", data_dir.c_str(), 1);

  try {
    Output sink(out_path, out);
    std::ostream& os = sink.stream();

    if (curve_cmd->parsed()) {
      const DiscountCurve curve = load_curve(curve_file, std::nullopt);
      std::optional<SpotRateSeries> spot;
      if (!spot_file.empty()) spot = io::read_spot_series(resolve_input(spot_file), spot_tenor);
      os << report::timestamp_header();
      report::curve_report(os, curve, spot ? &*spot : nullptr);
      return exit_code::ok;
    }

    if (scen_cmd->parsed()) {
      const DiscountCurve curve = load_curve(model.curve, std::nullopt);
      const ScenarioSet s = make_scenarios(model, curve, scen_horizon);
      const MartingaleDiagnostics d = martingale_test(s, curve, model.martingale_tolerance);
      if (!scen_csv.empty()) {
        std::ofstream f(scen_csv);
        if (!f) throw InputError("cannot write " + scen_csv);
        io::write_scenarios(f, s);
      }
      os << report::timestamp_header();
      report::martingale_report(os, d, s.size());
      return d.pass ? exit_code::ok : exit_code::numerical_failure;
    }

    if (bound_cmd->parsed() || grid_cmd->parsed()) {
      const io::BoundFile f = load_bound(bound);
      if (!(grid_cmd->parsed() && grid_csv)) os << report::timestamp_header();
      if (bound_cmd->parsed()) {
        if (!f.description.empty()) os << f.description << "\n\n";
        report::bound_report(os, f.inputs, lower_bound(f.inputs), f.reported_fdb);
        os << '\n';
      }
      print_grids(os, f.inputs, grid_cmd->parsed() && grid_csv);
      return exit_code::ok;
    }

    if (val_cmd->parsed() || report_cmd->parsed()) {
      const io::PortfolioFile pf = io::read_portfolio(resolve_input(portfolio_file));
      const DiscountCurve curve = load_curve(model.curve, pf.curve_file);
      ProjectionOptions popts;
      popts.threads = model.threads;
      if (!drop.empty()) popts.drop_cashflow_year = parse_drop_year(drop);
      const int horizon = projection_horizon(pf.portfolio, popts);
      const ScenarioSet s = make_scenarios(model, curve, horizon);
      const MartingaleDiagnostics mg = martingale_test(s, curve, model.martingale_tolerance);

      if (report_cmd->parsed()) {
        os << report::timestamp_header();
        const io::BoundFile bf = load_bound(bound);
        os << "== lower bound ==\n";
        report::bound_report(os, bf.inputs, lower_bound(bf.inputs), bf.reported_fdb);
        os << "\n== sensitivity ==\n";
        print_grids(os, bf.inputs, false);
        os << "\n== leakage test: " << (pf.description.empty() ? portfolio_file : pf.description) << " ==\n";
      } else if (!json) {
        os << report::timestamp_header();
      }
      if (!json) report::martingale_report(os, mg, s.size());
      if (!mg.pass) {
        if (json) os << nlohmann::json{{"martingale", {{"max_error", mg.max_error}, {"pass", false}}}}.dump(2) << '\n';
        return exit_code::numerical_failure;
      }

      const CashflowLedger ledger = project(s, pf.portfolio, popts);
      const ValuationResult v = value(ledger, &curve);
      const LeakageResult leak = leakage_test(v, ledger.bv0, ledger.ug0(), tolerance);
      if (!ledger_csv.empty()) {
        std::ofstream f(ledger_csv);
        if (!f) throw InputError("cannot write " + ledger_csv);
        io::write_ledger(f, ledger);
      }
      if (json) {
        os << report::validation_json(v, leak, mg).dump(2) << '\n';
      } else {
        report::validation_report(os, v, leak);
      }
      return leak.pass ? exit_code::ok : exit_code::validation_failed;
    }
  } catch (const InsolvencyError& e) {
    err << "insolvent: " << e.what() << '\n';
    return exit_code::insolvent;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return exit_code::input_error;
  } catch (const std::out_of_range& e) {
    err << "input error: " << e.what() << '\n';
    return exit_code::input_error;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return exit_code::numerical_failure;
  }
  return exit_code::ok;
}

}  // namespace wplab::cli
