#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "command.hpp"
#include "spectrum/error.hpp"
#include "spectrum/presets.hpp"
#include "spectrum/sweep.hpp"

namespace spectrum::cli {

namespace {

struct Row {
  std::string quantity;
  std::string computed;
  std::string expected;
  std::string tolerance;
  bool pass;
};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct Table {
  std::vector<Row> rows;

  void value(const std::string& name, double computed, double expected, double tol) {
    rows.push_back({name, fmt(computed), fmt(expected), fmt(tol), std::abs(computed - expected) <= tol});
  }
  void flag(const std::string& name, bool computed) {
    rows.push_back({name, computed ? "true" : "false", "true", "-", computed});
  }
  void count(const std::string& name, long computed, long expected) {
    rows.push_back({name, std::to_string(computed), std::to_string(expected), "0", computed == expected});
  }
  bool passed() const {
    return std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.pass; });
  }
  void print(const std::string& preset, std::ostream& out) const {
    char line[256];
    out << "preset " << preset << "\n";
    std::snprintf(line, sizeof line, "%-44s %-16s %-16s %-10s %s\n", "quantity", "computed", "expected", "tol",
                  "status");
    out << line;
    for (const auto& r : rows) {
      std::snprintf(line, sizeof line, "%-44s %-16s %-16s %-10s %s\n", r.quantity.c_str(), r.computed.c_str(),
                    r.expected.c_str(), r.tolerance.c_str(), r.pass ? "PASS" : "FAIL");
      out << line;
    }
    out << "overall " << (passed() ? "PASS" : "FAIL") << "\n";
  }
};

std::optional<double> first_breakpoint(const SweepResult& s, BreakpointKind kind) {
  for (const auto& b : s.breakpoints) {
    if (b.kind == kind) return b.capacity;
  }
  return std::nullopt;
}

SweepOptions sweep_options(const Command& c) {
  SweepOptions o;
  o.threads = c.threads;
  return o;
}

void homogeneous(Table& t, double W, double c2_expected, double efficiency_expected, const Command& c) {
  const Thresholds th = closed_form_thresholds(W, 0.0, 0.0, 1.0, 1.0);
  const double c1_expected = (1.0 - W / 2.0) / W;
  t.value("C1 (closed form)", th.c1, c1_expected, 1e-9);
  t.value("C2 (closed form)", th.c2, c2_expected, 1e-9);
  t.value("S(0) (closed form)", th.s0, W * W / 4.0, 1e-9);
  t.value("S(C2) (closed form)", th.sc2, W * W / (2.0 * (std::sqrt(W * W + 1.0) + 1.0)), 1e-9);
  t.value("efficiency S(C2)/S(0)", th.efficiency(), efficiency_expected, 1e-3);

  HomogeneousBoxParams params;
  params.valuation = W;
  const MarketConfig market = homogeneous_box_market(params, 0.0);
  const double step = 1e-3;
  const SweepResult s = sweep_capacity(market, linear_capacity_grid(0.0, 2.0, 2001), sweep_options(c));
  const auto& at0 = s.samples.front().result;
  t.value("equilibrium price at C=0", at0 ? at0->prices.licensed.begin()->second : NAN, W / 2.0, 1e-9);
  t.value("SW at C=0 (sweep)", at0 ? at0->report.social_welfare : NAN, th.s0, 1e-9);
  const EquilibriumResult at_c2 = solve(market.with_capacity(th.c2));
  t.value("SW at C2 / SW at 0 (solver)", at_c2.report.social_welfare / th.s0, efficiency_expected, 1e-3);
  if (th.c1 > 0.0) {
    const auto c1 = first_breakpoint(s, BreakpointKind::FlatToDecreasing);
    t.value("C1 (sweep, FlatToDecreasing)", c1.value_or(NAN), th.c1, step);
  }
  const auto c2 = first_breakpoint(s, BreakpointKind::DecreasingToIncreasing);
  t.value("C2 (sweep, DecreasingToIncreasing)", c2.value_or(NAN), th.c2, step);
}

void symmetric(Table& t, const Command& c) {
  const MarketConfig market = symmetric_linear_market(2, 4.0, 0.0);
  const auto grid = linear_capacity_grid(0.0, 2.0, 81);
  const SweepResult open = sweep_capacity(market, grid, sweep_options(c));
  const SweepResult split = divided_capacity_sweep(market, grid, 2, sweep_options(c));
  bool braess = false, monotone = true, dominates = true, complete = true;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto& a = open.samples[k].result;
    const auto& b = split.samples[k].result;
    if (!a || !b) {
      complete = false;
      continue;
    }
    dominates = dominates && b->report.social_welfare >= a->report.social_welfare - 1e-12;
    if (k > 0 && open.samples[k - 1].result && split.samples[k - 1].result) {
      braess = braess || a->report.social_welfare < open.samples[k - 1].result->report.social_welfare - 1e-9;
      monotone = monotone && b->report.social_welfare >= split.samples[k - 1].result->report.social_welfare - 1e-12;
    }
  }
  t.flag("every sample solved", complete);
  t.flag("unlicensed SW strictly decreases somewhere", braess);
  t.flag("divided-capacity SW non-decreasing", monotone);
  t.flag("divided-capacity SW >= unlicensed SW", dominates);
  const auto& at0 = open.samples.front().result;
  if (at0) {
    const DeviationReport d = verify_equilibrium(market, *at0, 1e-3);
    t.value("max deviation gain at C=0 (grid 1e-3)", std::max(d.max_gain, 0.0), 0.0, 1e-6);
  }
}

void heterogeneous(Table& t, const Command& c) {
  const MarketConfig market = two_class_box_market({}, 0.0);
  const EquilibriumResult at0 = solve(market);
  t.value("equilibrium price at C=0", at0.prices.licensed.begin()->second, 0.62, 1e-3);
  t.value("incumbent revenue at C=0", at0.report.revenues.at("incumbent"), 0.62 * 2.3, 1e-9);
  const SweepResult s = sweep_capacity(market, default_capacity_grid(), sweep_options(c));
  std::vector<Breakpoint> jumps;
  for (const auto& b : s.breakpoints) {
    if (b.kind == BreakpointKind::PriceJump) jumps.push_back(b);
  }
  t.count("price jumps detected", static_cast<long>(jumps.size()), 1);
  if (jumps.size() != 1) return;
  const Breakpoint& j = jumps.front();
  t.flag("jump is upward", j.after > j.before);
  t.flag("jump is ServeBothTypes -> ServeHighOnly",
         j.regime_before == Regime::ServeBothTypes && j.regime_after == Regime::ServeHighOnly);
  double cs_before = NAN, cs_after = NAN;
  for (const auto& sample : s.samples) {
    if (sample.capacity == j.lo && sample.result) cs_before = sample.result->report.consumer_surplus;
    if (sample.capacity == j.hi && sample.result) cs_after = sample.result->report.consumer_surplus;
  }
  t.flag("CS just after the jump below CS just before", cs_after < cs_before);
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"unit-w1", "unit-w2", "duopoly", "two-class"};
  return names;
}

int reproduce(const Command& command, std::ostream& out, std::ostream& err) {
  Table t;
  if (command.preset == "unit-w1") {
    homogeneous(t, 1.0, std::sqrt(2.0) / 2.0, 0.8284, command);
  } else if (command.preset == "unit-w2") {
    homogeneous(t, 2.0, (std::sqrt(5.0) - 1.0) / 4.0, 0.6180, command);
  } else if (command.preset == "duopoly") {
    symmetric(t, command);
  } else if (command.preset == "two-class") {
    heterogeneous(t, command);
  } else {
    err << "error: unknown preset '" << command.preset << "' (expected unit-w1, unit-w2, duopoly, two-class)\n";
    return kExitValidation;
  }
  if (command.output_path.empty()) {
    t.print(command.preset, out);
  } else {
    std::ofstream f(command.output_path, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidConfig, "cannot write '" + command.output_path + "'");
    t.print(command.preset, f);
  }
  return t.passed() ? kExitOk : kExitValidation;
}

}  // namespace spectrum::cli
