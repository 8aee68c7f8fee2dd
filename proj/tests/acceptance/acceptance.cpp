// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "spectrum/best_response.hpp"
#include "spectrum/equilibrium.hpp"
#include "spectrum/error.hpp"
#include "spectrum/oracle.hpp"
#include "spectrum/presets.hpp"
#include "spectrum/sweep.hpp"

using namespace spectrum;

namespace {

std::mt19937_64 rng(20261015);

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// Every equilibrium produced by criteria 1-8, for the accounting check.
std::vector<EquilibriumResult> produced;

void keep(const EquilibriumResult& r) { produced.push_back(r); }
void keep(const SweepResult& s) {
  for (const auto& sample : s.samples) {
    if (sample.result) produced.push_back(*sample.result);
  }
}

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void near(double actual, double expected, double tol, const std::string& what) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s = %.12g, expected %.12g +- %g", what.c_str(), actual, expected, tol);
    require(std::abs(actual - expected) <= tol, buf);
  }
};

double sw(const SweepSample& s) { return s.result->report.social_welfare; }

std::optional<double> breakpoint_at(const SweepResult& s, BreakpointKind kind) {
  for (const auto& b : s.breakpoints) {
    if (b.kind == kind) return b.capacity;
  }
  return std::nullopt;
}

bool all_solved(const SweepResult& s) {
  for (const auto& sample : s.samples) {
    if (!sample.result) return false;
  }
  return true;
}

// Closed-form and swept thresholds of the unit homogeneous market at valuation W.
void homogeneous_thresholds(Check& c, double W, double c2_expected, double efficiency) {
  const Thresholds th = closed_form_thresholds(W, 0.0, 0.0, 1.0, 1.0);
  c.near(th.c2, c2_expected, 1e-9, "C2 closed form");
  c.near(th.efficiency(), efficiency, 1e-3, "S(C2)/S(0) closed form");
  const SweepResult s = sweep_capacity(homogeneous_box_market({.valuation = W}, 0.0), linear_capacity_grid(0.0, 2.0, 2001));
  keep(s);
  c.require(all_solved(s), "every sweep sample solved");
  if (!all_solved(s)) return;
  double lowest = sw(s.samples.front());
  for (const auto& sample : s.samples) lowest = std::min(lowest, sw(sample));
  c.near(lowest / sw(s.samples.front()), efficiency, 1e-3, "min SW / S(0) from sweep");
  const auto c2 = breakpoint_at(s, BreakpointKind::DecreasingToIncreasing);
  c.require(c2.has_value(), "DecreasingToIncreasing detected");
  if (c2) c.near(*c2, c2_expected, 1e-3, "C2 from sweep");
}

Check criterion1() {
  Check c;
  const Thresholds th = closed_form_thresholds(1.0, 0.0, 0.0, 1.0, 1.0);
  c.near(th.c1, 0.5, 1e-9, "C1 closed form");
  c.near(th.s0, 0.25, 1e-9, "S(0) closed form");
  homogeneous_thresholds(c, 1.0, std::sqrt(2.0) / 2.0, 0.8284);
  const SweepResult s = sweep_capacity(homogeneous_box_market({}, 0.0), linear_capacity_grid(0.0, 2.0, 2001));
  keep(s);
  const auto c1 = breakpoint_at(s, BreakpointKind::FlatToDecreasing);
  c.require(c1.has_value(), "FlatToDecreasing detected");
  if (c1) c.near(*c1, 0.5, 1e-3, "C1 from sweep");
  if (all_solved(s)) c.near(sw(s.samples.front()), 0.25, 1e-9, "S(0) from sweep");
  return c;
}

Check criterion2() {
  Check c;
  homogeneous_thresholds(c, 2.0, (std::sqrt(5.0) - 1.0) / 4.0, 0.6180);
  return c;
}

Check criterion3() {
  Check c;
  const MarketConfig m = two_class_box_market({}, 0.0);
  const EquilibriumResult r0 = solve(m);
  keep(r0);
  c.near(r0.prices.licensed.at("incumbent"), 0.62, 1e-3, "price at C=0");
  const SweepResult s = sweep_capacity(m, default_capacity_grid(400, 1e-3, 10.0));
  keep(s);
  c.require(all_solved(s), "every sweep sample solved");
  int jumps = 0;
  for (const auto& b : s.breakpoints) {
    if (b.kind != BreakpointKind::PriceJump) continue;
    ++jumps;
    c.require(b.after > b.before, "jump is upward");
    c.require(b.regime_before == Regime::ServeBothTypes && b.regime_after == Regime::ServeHighOnly,
              "jump coincides with ServeBothTypes -> ServeHighOnly");
    const SweepSample* before = nullptr;
    const SweepSample* after = nullptr;
    for (const auto& sample : s.samples) {
      if (sample.capacity == b.lo) before = &sample;
      if (sample.capacity == b.hi) after = &sample;
    }
    c.require(before && after && before->result && after->result &&
                  after->result->report.consumer_surplus < before->result->report.consumer_surplus,
              "CS drops across the jump");
  }
  c.require(jumps == 1, "exactly one PriceJump (found " + std::to_string(jumps) + ")");
  return c;
}

Check criterion4() {
  Check c;
  for (int k = 0; k < 10; ++k) {
    const double W = uniform(0.2, 1.8);
    const Thresholds th = closed_form_thresholds(W, 0.0, 0.0, 1.0, 1.0);
    const double hi = 2.0 * th.c2;
    const auto grid = linear_capacity_grid(0.0, hi, 1001);
    const double step = grid[1] - grid[0];
    const SweepResult s = sweep_capacity(homogeneous_box_market({.valuation = W}, 0.0), grid);
    keep(s);
    const std::string tag = "W=" + std::to_string(W) + ": ";
    if (!all_solved(s)) {
      c.require(false, tag + "unsolved samples");
      continue;
    }
    bool flat = true, down = true, up = true;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double a = grid[i - 1], b = grid[i];
      const double d = sw(s.samples[i]) - sw(s.samples[i - 1]);
      if (b <= th.c1) flat = flat && std::abs(d) < 1e-8;
      if (a >= th.c1 && b <= th.c2) down = down && d < 0.0;
      if (a >= th.c2) up = up && d > 0.0;
    }
    c.require(flat, tag + "SW flat on [0, C1]");
    c.require(down, tag + "SW strictly decreasing on (C1, C2)");
    c.require(up, tag + "SW strictly increasing beyond C2");
    const auto c1 = breakpoint_at(s, BreakpointKind::FlatToDecreasing);
    const auto c2 = breakpoint_at(s, BreakpointKind::DecreasingToIncreasing);
    c.require(c1 && std::abs(*c1 - th.c1) <= step * (1 + 1e-9), tag + "C1 breakpoint within one step");
    c.require(c2 && std::abs(*c2 - th.c2) <= step * (1 + 1e-9), tag + "C2 breakpoint within one step");
    for (const auto& b : s.breakpoints) {
      const bool near_threshold = std::abs(b.capacity - th.c1) <= step * (1 + 1e-9) ||
                                  std::abs(b.capacity - th.c2) <= step * (1 + 1e-9);
      c.require(near_threshold, tag + "stray breakpoint " + to_string(b.kind) + " at " + std::to_string(b.capacity));
    }
  }
  return c;
}

MarketConfig random_homogeneous(double capacity, double dl, double dg) {
  MarketConfig m;
  const double Q = uniform(0.5, 2.0);
  const double b = uniform(0.5, 2.0);
  const double T1 = uniform(0.0, 0.3);
  const double W = T1 + uniform(0.1, 1.0) * b * Q;
  m.providers.push_back(ServiceProvider::incumbent("incumbent", {T1, b, dl}));
  m.providers.push_back(ServiceProvider::entrant("entrant"));
  m.unlicensed = {capacity, {uniform(0.0, 0.3), uniform(0.5, 2.0), dg}};
  m.classes.push_back({1.0, DemandSpec{BoxDemand{W, Q}}});
  return m;
}

Check criterion5() {
  Check c;
  double worst = INFINITY;
  for (int k = 0; k < 100; ++k) {
    const MarketConfig m = random_homogeneous(uniform(0.01, 5.0), uniform_int(1, 2), uniform_int(1, 2));
    try {
      const EquilibriumResult with = solve(m);
      const EquilibriumResult without = solve(m.with_capacity(0.0));
      keep(with);
      keep(without);
      worst = std::min(worst, without.delivered.per_class[0] - with.delivered.per_class[0]);
    } catch (const Error& e) {
      c.require(false, std::string("config ") + std::to_string(k) + ": " + e.what());
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "worst margin %.3g", worst);
  c.require(worst >= -1e-9, buf);
  return c;
}

std::vector<std::pair<std::string, MarketConfig>> preset_equilibria() {
  std::vector<std::pair<std::string, MarketConfig>> out;
  for (double C : {0.0, 0.25, 0.6, 1.0, 2.0}) {
    out.push_back({"unit-w1 C=" + std::to_string(C), homogeneous_box_market({}, C)});
    out.push_back({"unit-w2 C=" + std::to_string(C), homogeneous_box_market({.valuation = 2.0}, C)});
    out.push_back({"duopoly C=" + std::to_string(C), symmetric_linear_market(2, 4.0, C)});
  }
  for (double C : {0.0, 0.05, 0.07, 0.3, 1.0}) {
    out.push_back({"two-class C=" + std::to_string(C), two_class_box_market({}, C)});
  }
  return out;
}

Check criterion6() {
  Check c;
  for (const auto& [name, m] : preset_equilibria()) {
    const EquilibriumResult r = solve(m);
    keep(r);
    const DeviationReport d = verify_equilibrium(m, r, 1e-3);
    c.require(d.max_unlicensed_gain <= 1e-6, name + ": unlicensed deviation gains " + std::to_string(d.max_unlicensed_gain));
    c.require(d.unlicensed_pricing_consistent, name + ": unlicensed prices not zero");
  }
  const MarketConfig idle = homogeneous_box_market({.unlicensed_offset = 1.5}, 1.0);
  const EquilibriumResult r = solve(idle);
  keep(r);
  const DeviationReport d = verify_equilibrium(idle, r, 1e-3);
  c.require(r.allocation.unlicensed_total() == 0.0, "T2 > W leaves the band idle");
  c.require(d.no_service_condition.value_or(false), "no-service condition holds when T2 > W");
  c.require(d.max_unlicensed_gain <= 1e-6, "no unlicensed gain when T2 > W");
  return c;
}

Check criterion7() {
  Check c;
  const MarketConfig m = symmetric_linear_market(2, 4.0, 0.0);
  const auto grid = linear_capacity_grid(0.0, 2.0, 81);
  const SweepResult open = sweep_capacity(m, grid);
  const SweepResult split = divided_capacity_sweep(m, grid, 2);
  keep(open);
  keep(split);
  c.require(all_solved(open) && all_solved(split), "every sample solved");
  if (!c.ok) return c;
  bool braess = false, monotone = true, dominates = true;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    dominates = dominates && sw(split.samples[k]) >= sw(open.samples[k]);
    if (k == 0) continue;
    braess = braess || sw(open.samples[k]) < sw(open.samples[k - 1]) - 1e-9;
    monotone = monotone && sw(split.samples[k]) >= sw(split.samples[k - 1]);
  }
  c.require(braess, "unlicensed SW decreases on some interval");
  c.require(monotone, "divided-capacity SW non-decreasing");
  c.require(dominates, "divided-capacity SW >= unlicensed SW");
  return c;
}

MarketConfig random_small_market() {
  MarketConfig m;
  const int incumbents = uniform_int(1, 2);
  for (int i = 0; i < incumbents; ++i) {
    m.providers.push_back(
        ServiceProvider::incumbent("inc" + std::to_string(i + 1), {uniform(0.0, 0.3), uniform(0.3, 2.0), 1.0}));
  }
  if (incumbents == 1) m.providers.push_back(ServiceProvider::entrant("ent"));
  m.unlicensed = {uniform_int(0, 4) == 0 ? 0.0 : uniform(0.1, 3.0), {uniform(0.0, 0.3), uniform(0.3, 2.0), 1.0}};
  const int classes = uniform_int(1, 2);
  const double wh = uniform(0.3, 1.0);
  for (int t = 0; t < classes; ++t) {
    const double weight = t == 0 ? wh : wh * uniform(0.1, 0.9);
    if (uniform_int(0, 1)) {
      m.classes.push_back({weight, DemandSpec{BoxDemand{uniform(0.3, 2.0), uniform(0.3, 1.5)}}});
    } else {
      m.classes.push_back({weight, DemandSpec{LinearDemand{uniform(0.5, 2.0), uniform(1.0, 4.0)}}});
    }
  }
  return m;
}

PriceProfile random_prices(const MarketConfig& m) {
  PriceProfile p;
  for (const auto& sp : m.providers) {
    if (sp.is_incumbent()) p.licensed[sp.id] = uniform(0.0, 1.0);
    p.unlicensed[sp.id] = uniform_int(0, 1) ? 0.0 : uniform(0.0, 0.5);
  }
  return p;
}

double class_mass(const MarketConfig& m, std::size_t t) {
  const auto& d = m.classes[t].demand;
  return d.is_box() ? d.box().mass : d.linear().intercept / d.linear().elasticity;
}

Check criterion8() {
  Check c;
  constexpr int kMesh = 500;
  for (int k = 0; k < 50; ++k) {
    const MarketConfig m = random_small_market();
    const PriceProfile p = random_prices(m);
    const Allocation exact = allocate(m, p);
    const Allocation approx = discretized_wardrop(m, p, kMesh);
    keep(evaluate_profile(m, p));
    double worst = 0.0;
    for (std::size_t t = 0; t < m.classes.size(); ++t) {
      const double q = class_mass(m, t) / kMesh;
      for (std::size_t i = 0; i < m.providers.size(); ++i) {
        worst = std::max(worst, std::abs(exact.licensed[i][t] - approx.licensed[i][t]) / q);
      }
      worst = std::max(worst, std::abs(exact.unlicensed_class(t) - approx.unlicensed_class(t)) / q);
      worst = std::max(worst, std::abs(exact.served(t) - approx.served(t)) / q);
    }
    c.require(worst <= 2.0 + 1e-9, "instance " + std::to_string(k) + ": " + std::to_string(worst) + " quanta apart");
  }
  constexpr double kResolution = 1e-4;
  for (const auto& [name, m] : preset_equilibria()) {
    const EquilibriumResult r = solve(m);
    keep(r);
    double hi = 0.0;
    for (const auto& cls : m.classes) hi = std::max(hi, cls.demand.choke_price());
    const std::string focal = m.providers[m.first_incumbent()].id;
    const GridSpec grid = GridSpec::with_resolution(0.0, hi, kResolution);
    const GridOptimum g = grid_best_response(m, m.unlicensed.capacity, r.prices, grid, focal);
    const double analytic = r.prices.licensed.at(focal);
    const double revenue = r.report.revenues.at(focal);
    c.require(revenue >= g.revenue - 1e-9, name + ": grid beats the analytic best response");
    c.require(std::abs(analytic - g.price) <= grid.step() || std::abs(revenue - g.revenue) <= 1e-9,
              name + ": price " + std::to_string(analytic) + " vs grid " + std::to_string(g.price));
  }
  return c;
}

Check criterion9() {
  Check c;
  double worst = 0.0;
  for (const auto& r : produced) {
    worst = std::max(worst, std::abs(r.report.social_welfare - r.report.consumer_surplus - r.report.total_revenue()));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu equilibria, worst gap %.3g", produced.size(), worst);
  c.require(!produced.empty() && worst <= 1e-9, buf);
  if (c.ok) c.detail = buf;
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double limit_s;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "homogeneous thresholds, W=1", 1.0, criterion1},
      {2, "homogeneous thresholds, W=2", 1.0, criterion2},
      {3, "two-class price jump", 30.0, criterion3},
      {4, "welfare shape on random valuations", 60.0, criterion4},
      {5, "unlicensed band lowers delivered price", 60.0, criterion5},
      {6, "zero unlicensed prices certified", 60.0, criterion6},
      {7, "symmetric duopoly and divided capacity", 120.0, criterion7},
      {8, "oracle equivalence", 120.0, criterion8},
      {9, "welfare accounting identity", 60.0, criterion9},
  };
  int failures = 0;
  for (const auto& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      c = cr.run();
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char limit[96];
    std::snprintf(limit, sizeof limit, "runtime %.2fs over %.0fs", secs, cr.limit_s);
    if (secs > cr.limit_s) c.require(false, limit);
    failures += c.ok ? 0 : 1;
    std::printf("criterion %d: %s  %s (%.2fs)%s%s\n", cr.id, c.ok ? "PASS" : "FAIL", cr.title, secs,
                c.detail.empty() ? "" : "  ", c.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%s: %d of %zu criteria passed\n", failures ? "FAIL" : "PASS", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures ? 1 : 0;
}
