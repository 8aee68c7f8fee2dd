#include "helpers.hpp"
#include "spectrum/error.hpp"
#include "spectrum/sweep.hpp"

#include <cmath>

using namespace spectrum;
using testing::near;

namespace {

std::vector<SweepSample> synthetic(const std::vector<double>& sw) {
  std::vector<SweepSample> out;
  for (std::size_t k = 0; k < sw.size(); ++k) {
    EquilibriumResult r;
    r.capacity = 0.1 * k;
    r.report.social_welfare = sw[k];
    r.prices.licensed["incumbent"] = 0.5;
    out.push_back({r.capacity, r, {}});
  }
  return out;
}

// Welfare of the unit homogeneous market computed by hand from the
// equilibrium allocation implied by each regime.
double welfare_by_hand(double C) {
  const Thresholds th = closed_form_thresholds(1.0, 0.0, 0.0, 1.0, 1.0);
  if (C <= th.c1) return 0.25;
  if (C <= th.c2) {
    const double xw = C;
    const double x = 1.0 - xw;
    return 1.0 - x * x - xw * 1.0;
  }
  const double s2 = 1.0 / C;
  const double x = s2 / (2.0 * (1.0 + s2));
  const double xw = 1.0 - x;
  return 1.0 - x * x - xw * s2 * xw;
}

}  // namespace

TEST_CASE("closed-form thresholds of the unit market") {
  const Thresholds a = closed_form_thresholds(1.0, 0.0, 0.0, 1.0, 1.0);
  near(a.c1, 0.5, 1e-12);
  near(a.c2, std::sqrt(0.5), 1e-12);
  near(a.s0, 0.25, 1e-12);
  near(a.efficiency(), 2.0 * (std::sqrt(2.0) - 1.0), 1e-9);
  const Thresholds b = closed_form_thresholds(2.0, 0.0, 0.0, 1.0, 1.0);
  near(b.c1, 0.0, 1e-12);
  near(b.c2, (std::sqrt(5.0) - 1.0) / 4.0, 1e-12);
  near(b.efficiency(), 0.6180339887, 1e-9);
}

TEST_CASE("first threshold diverges as the valuation vanishes") {
  double prev = 0.0;
  for (double W : {0.5, 0.1, 0.01, 1e-4}) {
    const Thresholds t = closed_form_thresholds(W, 0.0, 0.0, 1.0, 1.0);
    CHECK(t.c1 > prev);
    prev = t.c1;
  }
  CHECK(prev > 1e3);
}

TEST_CASE("thresholds from a market and invalid shapes") {
  const Thresholds t = closed_form_thresholds(homogeneous_box_market({.valuation = 1.4}, 1.0));
  const Thresholds u = closed_form_thresholds(1.4, 0.0, 0.0, 1.0, 1.0);
  CHECK(t.c1 == u.c1);
  CHECK(t.c2 == u.c2);
  CHECK_THROWS_AS(closed_form_thresholds(two_class_box_market({}, 1.0)), Error);
  CHECK_THROWS_AS(closed_form_thresholds(3.0, 0.0, 0.0, 1.0, 1.0), Error);
}

TEST_CASE("unit market sweep finds the two welfare breakpoints") {
  const SweepResult r = sweep_capacity(homogeneous_box_market({}, 0.0), linear_capacity_grid(0.0, 2.0, 401));
  REQUIRE(r.closed_form.has_value());
  REQUIRE(r.breakpoints.size() == 2);
  CHECK(r.breakpoints[0].kind == BreakpointKind::FlatToDecreasing);
  CHECK(std::abs(r.breakpoints[0].capacity - 0.5) <= 0.005 + 1e-12);
  CHECK(r.breakpoints[1].kind == BreakpointKind::DecreasingToIncreasing);
  CHECK(std::abs(r.breakpoints[1].capacity - std::sqrt(0.5)) <= 0.005 + 1e-12);
  for (const auto& s : r.samples) {
    REQUIRE(s.result.has_value());
    near(s.result->report.social_welfare, welfare_by_hand(s.capacity), 1e-6);
  }
}

TEST_CASE("welfare rises beyond the second threshold") {
  const SweepResult r = sweep_capacity(homogeneous_box_market({}, 0.0), linear_capacity_grid(0.75, 5.0, 50));
  for (std::size_t k = 1; k < r.samples.size(); ++k) {
    CHECK(r.samples[k].result->report.social_welfare > r.samples[k - 1].result->report.social_welfare);
  }
}

TEST_CASE("breakpoint detection edge cases") {
  CHECK(detect_breakpoints(synthetic({0.25})).empty());
  CHECK(detect_breakpoints(synthetic({0.1, 0.2, 0.3, 0.4, 0.5})).empty());
  const auto bps = detect_breakpoints(synthetic({0.1, 0.2, 0.3, 0.3, 0.3}));
  REQUIRE(bps.size() == 1);
  CHECK(bps[0].kind == BreakpointKind::IncreasingToFlat);
  auto failed = synthetic({0.1, 0.2, 0.3, 0.4, 0.3});
  failed[2].result.reset();
  failed[2].error = "boom";
  const auto skip = detect_breakpoints(failed);
  REQUIRE(skip.size() == 1);
  CHECK(skip[0].kind == BreakpointKind::IncreasingToDecreasing);
}

TEST_CASE("price jump detection on synthetic data") {
  auto s = synthetic({1.0, 1.0, 1.0, 1.0, 1.0, 1.0});
  const double prices[] = {0.50, 0.51, 0.52, 0.90, 0.91, 0.92};
  for (std::size_t k = 0; k < s.size(); ++k) s[k].result->prices.licensed["incumbent"] = prices[k];
  const auto bps = detect_breakpoints(s);
  REQUIRE(bps.size() == 1);
  CHECK(bps[0].kind == BreakpointKind::PriceJump);
  near(bps[0].before, 0.52, 1e-15);
  near(bps[0].after, 0.90, 1e-15);
  near(bps[0].capacity, 0.25, 1e-12);
}

TEST_CASE("two-class sweep: one upward jump where the low class is dropped") {
  const SweepResult r = sweep_capacity(two_class_box_market({}, 0.0), linear_capacity_grid(0.0, 0.2, 81));
  int jumps = 0;
  for (const auto& b : r.breakpoints) {
    if (b.kind != BreakpointKind::PriceJump) continue;
    ++jumps;
    CHECK(b.after > b.before);
    CHECK(b.regime_before == Regime::ServeBothTypes);
    CHECK(b.regime_after == Regime::ServeHighOnly);
  }
  CHECK(jumps == 1);
}

TEST_CASE("divided capacity at zero equals the baseline") {
  const MarketConfig m = symmetric_linear_market(2, 4.0, 0.0);
  const std::vector<double> grid{0.0, 0.5};
  const SweepResult base = sweep_capacity(m, grid);
  const SweepResult div = divided_capacity_sweep(m, grid, 2);
  near(div.samples[0].result->report.social_welfare, base.samples[0].result->report.social_welfare, 1e-9);
  CHECK(div.samples[1].result->report.social_welfare > div.samples[0].result->report.social_welfare);
  CHECK_THROWS_AS(divided_capacity_sweep(m, grid, 3), Error);
}

TEST_CASE("sweep output does not depend on the thread count") {
  const MarketConfig m = two_class_box_market({}, 0.0);
  const auto grid = linear_capacity_grid(0.0, 1.0, 41);
  SweepOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const SweepResult a = sweep_capacity(m, grid, one);
  const SweepResult b = sweep_capacity(m, grid, four);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    CHECK(a.samples[k].result->report.social_welfare == b.samples[k].result->report.social_welfare);
    CHECK(a.samples[k].result->prices.licensed == b.samples[k].result->prices.licensed);
  }
  CHECK(a.breakpoints.size() == b.breakpoints.size());
}

TEST_CASE("capacity grids") {
  const auto g = default_capacity_grid(400, 1e-3, 10.0);
  REQUIRE(g.size() == 401);
  CHECK(g.front() == 0.0);
  near(g[1], 1e-3, 1e-15);
  near(g.back(), 10.0, 1e-12);
  const auto l = linear_capacity_grid(0.0, 2.0, 5);
  CHECK(l == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
}
