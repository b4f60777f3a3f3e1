#pragma once

// File formats. All parsing is strict: unknown fields, malformed rows and out-of-range
// values are InputError with the offending line or key named.
//
//   curve CSV        tenor,discount_factor
//   spot CSV         date,rate            (rate as decimal or percent string "1.08%")
//   scenario CSV     scenario,year,forward,deflator
//   ledger CSV       scenario,year,field,value
//   portfolio JSON   contracts, assets, rules, surplus fund
//   bound JSON       public balance-sheet figures plus lower-bound assumptions

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wplab/alm.hpp"
#include "wplab/bound.hpp"
#include "wplab/curve.hpp"
#include "wplab/errors.hpp"
#include "wplab/portfolio.hpp"
#include "wplab/scenarios.hpp"

namespace wplab::io {

namespace detail {

inline std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string where(const std::string& source, int line) {
  return source + ":" + std::to_string(line) + ": ";
}

inline double parse_number(const std::string& text, const std::string& source, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InputError(where(source, line) + "not a number: '" + text + "'");
  }
}

inline long parse_integer(const std::string& text, const std::string& source, int line) {
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InputError(where(source, line) + "not an integer: '" + text + "'");
  }
}

// Calls row(cells, line) for each data row with exactly `header.size()` cells. Blank lines
// and '#' comments are skipped; an optional header row must match `header` exactly.
template <class Fn>
void read_csv(std::istream& in, const std::string& source, const std::vector<std::string>& header, Fn&& row) {
  std::string line;
  int number = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++number;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    auto cells = split_csv(text);
    if (first) {
      first = false;
      bool looks_like_header = !cells.empty() && !cells[0].empty() &&
                               (std::isalpha(static_cast<unsigned char>(cells[0][0])) != 0);
      if (looks_like_header) {
        if (cells != header) {
          std::string expected;
          for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
          throw InputError(where(source, number) + "unexpected header, expected '" + expected + "'");
        }
        continue;
      }
    }
    if (cells.size() != header.size()) {
      throw InputError(where(source, number) + "expected " + std::to_string(header.size()) + " fields, got " +
                       std::to_string(cells.size()));
    }
    row(cells, number);
  }
}

inline std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

}  // namespace detail

// Decimal ("0.0108") or percent ("1.08%").
inline double parse_rate(const std::string& text, const std::string& source = "<rate>", int line = 0) {
  std::string t = detail::trim(text);
  if (!t.empty() && t.back() == '%') {
    t.pop_back();
    return detail::parse_number(detail::trim(t), source, line) / 100.0;
  }
  return detail::parse_number(t, source, line);
}

inline DiscountCurve read_curve(std::istream& in, const std::string& source = "<curve>") {
  std::vector<double> factors;
  detail::read_csv(in, source, {"tenor", "discount_factor"}, [&](const auto& cells, int line) {
    const long tenor = detail::parse_integer(cells[0], source, line);
    if (tenor != static_cast<long>(factors.size()) + 1) {
      throw InputError(detail::where(source, line) + "tenors must be consecutive years starting at 1, got " +
                       cells[0]);
    }
    const double p = detail::parse_number(cells[1], source, line);
    if (!(p > 0.0)) throw InputError(detail::where(source, line) + "discount factor must be > 0");
    factors.push_back(p);
  });
  if (factors.empty()) throw InputError(source + ": no curve rows");
  return DiscountCurve(std::move(factors));
}

inline DiscountCurve read_curve(const std::filesystem::path& path) {
  auto in = detail::open(path);
  return read_curve(in, path.string());
}

inline SpotRateSeries read_spot_series(std::istream& in, int tenor, const std::string& source = "<spot>") {
  SpotRateSeries s;
  s.tenor = tenor;
  detail::read_csv(in, source, {"date", "rate"}, [&](const auto& cells, int line) {
    if (cells[0].empty()) throw InputError(detail::where(source, line) + "empty date");
    s.dates.push_back(cells[0]);
    s.rates.push_back(parse_rate(cells[1], source, line));
  });
  if (s.rates.size() < 2) throw InputError(source + ": spot series needs at least 2 observations");
  if (tenor < 1) throw InputError(source + ": tenor must be >= 1");
  return s;
}

inline SpotRateSeries read_spot_series(const std::filesystem::path& path, int tenor) {
  auto in = detail::open(path);
  return read_spot_series(in, tenor, path.string());
}

inline void write_scenarios(std::ostream& out, const ScenarioSet& s) {
  out << "scenario,year,forward,deflator\n" << std::setprecision(17);
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (int t = 1; t <= s.horizon(); ++t) {
      out << i << ',' << t << ',' << s.forward(i, t) << ',' << s.deflator(i, t) << '\n';
    }
  }
}

// Externally generated paths. Deflators must agree with the forwards (B_t = B_{t-1}(1+F_{t-1})).
inline ScenarioSet read_scenarios(std::istream& in, const std::string& source = "<scenarios>") {
  struct Row {
    long scenario, year;
    double forward, deflator;
    int line;
  };
  std::vector<Row> rows;
  detail::read_csv(in, source, {"scenario", "year", "forward", "deflator"}, [&](const auto& c, int line) {
    rows.push_back({detail::parse_integer(c[0], source, line), detail::parse_integer(c[1], source, line),
                    detail::parse_number(c[2], source, line), detail::parse_number(c[3], source, line), line});
  });
  if (rows.empty()) throw InputError(source + ": no scenario rows");
  long horizon = 0;
  long n = 0;
  for (const auto& r : rows) {
    horizon = std::max(horizon, r.year);
    n = std::max(n, r.scenario + 1);
  }
  if (static_cast<std::size_t>(n * horizon) != rows.size()) {
    throw InputError(source + ": expected one row per scenario and year (" + std::to_string(n) + " x " +
                     std::to_string(horizon) + ")");
  }
  std::vector<double> forwards(rows.size(), std::nan(""));
  std::vector<double> deflators(rows.size(), 0.0);
  for (const auto& r : rows) {
    if (r.scenario < 0 || r.year < 1) throw InputError(detail::where(source, r.line) + "bad scenario or year");
    const std::size_t k = static_cast<std::size_t>(r.scenario * horizon + (r.year - 1));
    if (!std::isnan(forwards[k])) throw InputError(detail::where(source, r.line) + "duplicate scenario/year");
    forwards[k] = r.forward;
    deflators[k] = r.deflator;
  }
  ScenarioSet s = ScenarioSet::from_forwards(static_cast<std::size_t>(n), static_cast<int>(horizon), forwards);
  for (const auto& r : rows) {
    const double d = s.deflator(static_cast<std::size_t>(r.scenario), static_cast<int>(r.year));
    if (std::abs(d - r.deflator) > 1e-10 * std::max(1.0, std::abs(d))) {
      throw InputError(detail::where(source, r.line) + "deflator inconsistent with the forward path");
    }
  }
  return s;
}

inline void write_ledger(std::ostream& out, const CashflowLedger& ledger) {
  static const std::vector<std::pair<const char*, double LedgerEntry::*>> fields = {
      {"cf_guaranteed", &LedgerEntry::cf_guaranteed},
      {"cf_discretionary", &LedgerEntry::cf_discretionary},
      {"sh", &LedgerEntry::sh},
      {"tax", &LedgerEntry::tax},
      {"ph", &LedgerEntry::ph},
      {"gs", &LedgerEntry::gs},
      {"declared", &LedgerEntry::declared},
      {"roa", &LedgerEntry::roa},
      {"ur", &LedgerEntry::ur},
      {"bv", &LedgerEntry::bv},
      {"mv", &LedgerEntry::mv},
      {"ug", &LedgerEntry::ug},
      {"sf", &LedgerEntry::sf},
      {"forward", &LedgerEntry::forward},
      {"deflator", &LedgerEntry::deflator},
  };
  out << "scenario,year,field,value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < ledger.scenarios; ++i) {
    for (int t = 1; t <= ledger.horizon; ++t) {
      const LedgerEntry& e = ledger.entry(i, t);
      for (const auto& [name, member] : fields) out << i << ',' << t << ',' << name << ',' << e.*member << '\n';
    }
  }
}

namespace detail {

using nlohmann::json;

class StrictObject {
 public:
  StrictObject(const json& j, std::string context) : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) throw InputError(context_ + ": expected an object");
  }

  template <class T>
  T required(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw InputError(context_ + ": missing field '" + key + "'");
    return get<T>(key);
  }

  template <class T>
  T optional(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    return get<T>(key);
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw InputError(context_ + ": unknown field '" + it.key() + "'");
    }
  }

 private:
  template <class T>
  T get(const std::string& key) {
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw InputError(context_ + ": field '" + key + "' has the wrong type");
    }
  }

  const json& j_;
  std::string context_;
  std::set<std::string> seen_;
};

inline json parse_json(std::istream& in, const std::string& source) {
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw InputError(source + ": " + e.what());
  }
}

inline Contract parse_contract(const json& j, std::size_t index) {
  StrictObject o(j, "contracts[" + std::to_string(index) + "]");
  const std::string id = o.required<std::string>("id");
  const std::string type = o.optional<std::string>("type", "explicit");
  Contract c;
  if (type == "explicit") {
    c.id = id;
    c.maturity = o.required<int>("maturity");
    c.technical_rate = o.optional<double>("technical_rate", 0.0);
    c.reserves = o.required<std::vector<double>>("reserves");
    c.guaranteed = o.required<std::vector<double>>("guaranteed_cashflows");
  } else if (type == "pure_endowment" || type == "annuity") {
    const double reserve = o.required<double>("reserve");
    const double rate = o.required<double>("technical_rate");
    const int maturity = o.required<int>("maturity");
    c = type == "annuity" ? Contract::annuity(id, reserve, rate, maturity)
                          : Contract::pure_endowment(id, reserve, rate, maturity);
  } else {
    throw InputError("contracts[" + std::to_string(index) + "]: unknown contract type '" + type + "'");
  }
  o.finish();
  c.validate();
  return c;
}

inline Asset parse_asset(const json& j, std::size_t index) {
  StrictObject o(j, "assets[" + std::to_string(index) + "]");
  Asset a;
  a.id = o.required<std::string>("id");
  const std::string kind = o.required<std::string>("kind");
  if (kind == "bond") {
    a.kind = AssetKind::bond;
    a.face = o.required<double>("face");
    a.coupon = o.required<double>("coupon");
    a.maturity = o.required<int>("maturity");
    a.book_value = o.required<double>("book_value");
  } else if (kind == "equity") {
    a.kind = AssetKind::equity;
    a.market_value = o.required<double>("market_value");
    a.book_value = o.required<double>("book_value");
    a.dividend_yield = o.optional<double>("dividend_yield", 0.0);
    a.volatility = o.optional<double>("volatility", 0.0);
  } else if (kind == "cash") {
    a.kind = AssetKind::cash;
    a.market_value = o.required<double>("amount");
    a.book_value = a.market_value;
  } else {
    throw InputError("assets[" + std::to_string(index) + "]: unknown asset kind '" + kind + "'");
  }
  o.finish();
  a.validate();
  return a;
}

inline ManagementRules parse_rules(const json& j) {
  StrictObject o(j, "rules");
  ManagementRules r;
  r.gph = o.optional<double>("gph", r.gph);
  r.tax_rate = o.optional<double>("tax_rate", r.tax_rate);
  r.theta = o.optional<double>("theta", r.theta);
  r.smoothing = o.optional<double>("smoothing", r.smoothing);
  r.reinvestment_term = o.optional<int>("reinvestment_term", r.reinvestment_term);
  const std::string reinvest = o.optional<std::string>("reinvestment_rule", "par_bond");
  if (reinvest != "par_bond") throw InputError("rules: unknown reinvestment rule '" + reinvest + "'");
  const std::string realize = o.optional<std::string>("realization_rule", "pro_rata_shortfall");
  if (realize == "pro_rata_shortfall") {
    r.realization = RealizationRule::pro_rata_shortfall;
  } else if (realize == "none") {
    r.realization = RealizationRule::none;
  } else {
    throw InputError("rules: unknown realization rule '" + realize + "'");
  }
  o.finish();
  r.validate();
  return r;
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
  std::filesystem::path p(file);
  return p.is_absolute() ? p : base / p;
}

}  // namespace detail

struct PortfolioFile {
  Portfolio portfolio;
  std::string description;
  std::optional<std::filesystem::path> curve_file;
};

inline PortfolioFile read_portfolio(std::istream& in, const std::string& source = "<portfolio>",
                                    const std::filesystem::path& base = {}) {
  const auto j = detail::parse_json(in, source);
  detail::StrictObject o(j, source);
  PortfolioFile f;
  f.description = o.optional<std::string>("description", "");
  if (o.has("curve_file")) f.curve_file = detail::resolve(base, o.required<std::string>("curve_file"));
  f.portfolio.surplus_fund = o.optional<double>("surplus_fund", 0.0);
  f.portfolio.horizon = o.optional<int>("horizon", 0);
  if (o.has("rules")) f.portfolio.rules = detail::parse_rules(o.raw("rules"));
  const auto& contracts = o.raw("contracts");
  if (!contracts.is_array()) throw InputError(source + ": 'contracts' must be an array");
  for (std::size_t k = 0; k < contracts.size(); ++k) f.portfolio.contracts.push_back(detail::parse_contract(contracts[k], k));
  const auto& assets = o.raw("assets");
  if (!assets.is_array()) throw InputError(source + ": 'assets' must be an array");
  for (std::size_t k = 0; k < assets.size(); ++k) f.portfolio.assets.push_back(detail::parse_asset(assets[k], k));
  o.finish();
  f.portfolio.validate();
  return f;
}

inline PortfolioFile read_portfolio(const std::filesystem::path& path) {
  auto in = detail::open(path);
  return read_portfolio(in, path.string(), path.parent_path());
}

struct BoundFile {
  BoundInputs inputs;
  SpotRateSeries spot;
  std::optional<double> reported_fdb;
  std::string description;
  std::map<std::string, std::string> sources;
};

inline BoundConvention parse_convention(const std::string& s) {
  if (s == "published") return BoundConvention::published;
  if (s == "exact") return BoundConvention::exact;
  throw InputError("unknown rounding convention '" + s + "' (expected published or exact)");
}

inline BoundFile read_bound_inputs(std::istream& in, const std::string& source = "<bound>",
                                   const std::filesystem::path& base = {}) {
  const auto j = detail::parse_json(in, source);
  detail::StrictObject o(j, source);
  BoundFile f;
  f.description = o.optional<std::string>("description", "");
  f.sources = o.optional<std::map<std::string, std::string>>("sources", {});
  BoundInputs& b = f.inputs;
  b.book_value = o.required<double>("book_value");
  b.unrealized_gains = o.required<double>("unrealized_gains");
  b.surplus_fund = o.required<double>("surplus_fund");
  b.guaranteed = o.required<double>("guaranteed_benefits");
  if (o.has("reported_fdb")) f.reported_fdb = o.required<double>("reported_fdb");
  b.gph = o.optional<double>("gph", b.gph);
  b.cov_ph = o.optional<double>("cov_ph", b.cov_ph);
  b.anchor_maturity = o.optional<int>("anchor_maturity", b.anchor_maturity);
  b.c0 = o.optional<double>("C0", b.c0);
  b.horizon = o.optional<int>("horizon", b.horizon);
  b.half_life = o.optional<double>("half_life", b.half_life);
  b.deduct_surplus_fund = o.optional<bool>("deduct_surplus_fund", b.deduct_surplus_fund);
  b.exact_max_discount = o.optional<bool>("exact_max_discount", b.exact_max_discount);
  b.convention = parse_convention(o.optional<std::string>("convention", "published"));
  const auto curve_path = detail::resolve(base, o.required<std::string>("curve_file"));
  const auto spot_path = detail::resolve(base, o.required<std::string>("spot_file"));
  const int tenor = o.optional<int>("spot_tenor", 15);
  o.finish();
  b.curve = read_curve(curve_path);
  f.spot = read_spot_series(spot_path, tenor);
  b.cov_b = deflator_cov_table(f.spot, b.curve, b.curve.horizon());
  b.validate();
  return f;
}

inline BoundFile read_bound_inputs(const std::filesystem::path& path) {
  auto in = detail::open(path);
  return read_bound_inputs(in, path.string(), path.parent_path());
}

// Bundled datasets: $WPLAB_DATA_DIR, else the source-tree data directory.
inline std::filesystem::path data_dir() {
  if (const char* env = std::getenv("WPLAB_DATA_DIR"); env && *env) return env;
#ifdef WPLAB_DEFAULT_DATA_DIR
  return WPLAB_DEFAULT_DATA_DIR;
#else
  return "data";
#endif
}

}  // namespace wplab::io
