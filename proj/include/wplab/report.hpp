#pragma once

// Plain-text and JSON renderings of results. Amounts are shown half-up to one decimal;
// everything upstream carries full precision.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "wplab/bound.hpp"
#include "wplab/curve.hpp"
#include "wplab/scenarios.hpp"
#include "wplab/valuation.hpp"

namespace wplab::report {

inline std::string fixed(double value, int decimals) {
  // Half-up on the magnitude so that -0.05 shows as -0.1, matching printed tables.
  const double r = value < 0.0 ? -round_half_up(-value, decimals) : round_half_up(value, decimals);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, r == 0.0 ? 0.0 : r);
  return buf;
}

inline std::string sci(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", value);
  return buf;
}

inline std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

inline std::string timestamp_header() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[64];
  std::strftime(buf, sizeof buf, "# generated %Y-%m-%dT%H:%M:%SZ\n", &tm);
  return buf;
}

inline void curve_report(std::ostream& out, const DiscountCurve& curve, const SpotRateSeries* spot = nullptr) {
  const ForwardCurve fwd = bootstrap_forwards(curve);
  int argmax = 1;
  for (int t = 1; t <= curve.horizon(); ++t) {
    if (curve.factor(t) > curve.factor(argmax)) argmax = t;
  }
  out << "curve horizon: " << curve.horizon() << " years\n";
  out << "max discount factor: " << fixed(curve.factor(argmax), 3) << " at t=" << argmax << "\n\n";
  out << "   t   P(0,t)   forward   bank account";
  if (spot) out << "   CoV[deflator]";
  out << '\n';
  for (int t = 1; t <= curve.horizon(); ++t) {
    out << pad(std::to_string(t), 4) << pad(fixed(curve.factor(t), 6), 9) << pad(fixed(fwd.forward(t), 6), 10)
        << pad(fixed(fwd.bank_account(t), 6), 15);
    if (spot) out << pad(fixed(deflator_cov(*spot, curve, t), 6), 16);
    out << '\n';
  }
}

inline void martingale_report(std::ostream& out, const MartingaleDiagnostics& d, std::size_t scenarios) {
  out << "martingale test: " << (d.pass ? "PASS" : "FAIL") << " (" << scenarios << " scenarios, max relative error "
      << sci(d.max_error) << " at t=" << d.worst_tenor << ", tolerance " << sci(d.tolerance) << ")\n";
}

inline void bound_report(std::ostream& out, const BoundInputs& in, const LowerBoundResult& r,
                         std::optional<double> reported_fdb) {
  out << "A0 = BV0 + UG0       " << pad(fixed(in.a0(), 1), 8) << '\n';
  out << "GB                   " << pad(fixed(in.guaranteed, 1), 8) << '\n';
  out << "anchor maturity M    " << pad(std::to_string(in.anchor_maturity), 8) << '\n';
  out << "gph                  " << pad(fixed(in.gph, 2), 8) << '\n';
  out << "C0                   " << pad(fixed(in.c0, 2), 8) << '\n';
  out << "convention           " << pad(in.convention == BoundConvention::published ? "published" : "exact", 8)
      << (in.exact_max_discount ? " (exact max discount)" : "") << '\n';
  out << "eta                  " << pad(fixed(r.eta, 3), 8) << '\n';
  out << "D                    " << pad(fixed(r.depreciation, 4), 8) << '\n';
  out << "LB1 = D (A0 - GB)    " << pad(fixed(r.lb1, 1), 8) << '\n';
  out << "SF0 deducted         " << pad(fixed(r.surplus_deduction, 1), 8) << '\n';
  out << "F                    " << pad(fixed(r.cross_financing, 1), 8) << '\n';
  out << "LB                   " << pad(fixed(r.lb, 1), 8) << '\n';
  if (reported_fdb) {
    out << "reported FDB         " << pad(fixed(*reported_fdb, 1), 8) << "  (LB " << (r.lb <= *reported_fdb ? "<=" : ">")
        << " reported)\n";
  }
}

// Aligned LB table for one anchor maturity: rows C0, columns gph.
inline void grid_table(std::ostream& out, const SensitivityGrid& g, int maturity) {
  out << pad("M=" + std::to_string(maturity), 9);
  for (double gph : g.gphs) out << pad("gph=" + fixed(100.0 * gph, 0) + "%", 11);
  out << '\n';
  for (double c0 : g.c0s) {
    out << pad("C0=" + fixed(100.0 * c0, 0) + "%", 9);
    for (double gph : g.gphs) out << pad(fixed(g.cell(maturity, gph, c0).lb, 1), 11);
    out << '\n';
  }
}

// Cross-financing table for one anchor maturity: rows gph, columns C0.
inline void cross_financing_table(std::ostream& out, const SensitivityGrid& g, int maturity) {
  out << pad("F", 9);
  for (double c0 : g.c0s) out << pad("C0=" + fixed(100.0 * c0, 0) + "%", 9);
  out << '\n';
  for (double gph : g.gphs) {
    out << pad("gph=" + fixed(100.0 * gph, 0) + "%", 9);
    for (double c0 : g.c0s) out << pad(fixed(g.cell(maturity, gph, c0).cross_financing, 1), 9);
    out << '\n';
  }
}

inline void grid_csv(std::ostream& out, const SensitivityGrid& g) {
  out << "maturity,gph,C0,lb,cross_financing\n";
  for (const auto& c : g.cells) {
    out << c.maturity << ',' << fixed(c.gph, 4) << ',' << fixed(c.c0, 4) << ',' << fixed(c.lb, 6) << ','
        << fixed(c.cross_financing, 6) << '\n';
  }
}

inline std::string estimate(const Estimate& e) { return fixed(e.mean, 6) + " (se " + sci(e.std_error) + ")"; }

inline void validation_report(std::ostream& out, const ValuationResult& v, const LeakageResult& leak) {
  out << "scenarios            " << v.scenarios << '\n';
  out << "BV0                  " << fixed(v.bv0, 6) << '\n';
  out << "UG0                  " << fixed(v.ug0, 6) << '\n';
  out << "A0 = BV0 + UG0       " << fixed(v.bv0 + v.ug0, 6) << '\n';
  out << "BE                   " << estimate(v.be) << '\n';
  out << "  GB                 " << estimate(v.gb) << '\n';
  out << "  GB on curve        " << fixed(v.gb_curve, 6) << '\n';
  out << "  FDB                " << estimate(v.fdb) << '\n';
  out << "VIF                  " << estimate(v.vif) << '\n';
  out << "TAX                  " << estimate(v.tax) << '\n';
  out << "E[B_T^-1 MV_T]       " << estimate(v.terminal) << '\n';
  out << "residual             " << estimate(v.residual) << '\n';
  out << "leakage test: " << (leak.pass ? "PASS" : "FAIL") << " (relative residual " << sci(leak.relative)
      << ", tolerance " << sci(leak.tolerance) << ")\n";
}

inline nlohmann::json to_json(const Estimate& e) { return {{"mean", e.mean}, {"std_error", e.std_error}}; }

inline nlohmann::json validation_json(const ValuationResult& v, const LeakageResult& leak,
                                      const MartingaleDiagnostics& mg) {
  return {{"scenarios", v.scenarios},
          {"bv0", v.bv0},
          {"ug0", v.ug0},
          {"be", to_json(v.be)},
          {"gb", to_json(v.gb)},
          {"gb_curve", v.gb_curve},
          {"fdb", to_json(v.fdb)},
          {"vif", to_json(v.vif)},
          {"tax", to_json(v.tax)},
          {"terminal", to_json(v.terminal)},
          {"residual", to_json(v.residual)},
          {"leakage", {{"relative", leak.relative}, {"tolerance", leak.tolerance}, {"pass", leak.pass}}},
          {"martingale",
           {{"max_error", mg.max_error}, {"worst_tenor", mg.worst_tenor}, {"tolerance", mg.tolerance},
            {"pass", mg.pass}}}};
}

}  // namespace wplab::report
