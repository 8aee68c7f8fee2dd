#include "spectrum/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.hpp"
#include "spectrum/error.hpp"
#include "spectrum/presets.hpp"

namespace spectrum {

const char* to_string(BreakpointKind kind) noexcept {
  switch (kind) {
    case BreakpointKind::FlatToDecreasing: return "FlatToDecreasing";
    case BreakpointKind::FlatToIncreasing: return "FlatToIncreasing";
    case BreakpointKind::DecreasingToFlat: return "DecreasingToFlat";
    case BreakpointKind::DecreasingToIncreasing: return "DecreasingToIncreasing";
    case BreakpointKind::IncreasingToFlat: return "IncreasingToFlat";
    case BreakpointKind::IncreasingToDecreasing: return "IncreasingToDecreasing";
    case BreakpointKind::PriceJump: return "PriceJump";
    case BreakpointKind::RegimeSwitch: return "RegimeSwitch";
  }
  return "?";
}

Thresholds closed_form_thresholds(double W, double T1, double T2, double b, double kappa, double weight,
                                  double mass) {
  if (!(W > 0 && T1 >= 0 && T2 >= 0 && b > 0 && kappa > 0 && weight > 0 && mass > 0)) {
    throw Error(ErrorKind::InvalidConfig, "thresholds need W, b, kappa, weight, mass > 0 and T1, T2 >= 0");
  }
  const double inf = std::numeric_limits<double>::infinity();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double o1 = weight * T1, s1 = weight * b, o2 = weight * T2, k = weight * kappa, Q = mass;
  const double margin = W - o1;
  if (margin <= 0.0) throw Error(ErrorKind::RegimeViolation, "valuation below the licensed connection cost");
  const double x_mono = margin / (2.0 * s1);
  if (x_mono > Q) throw Error(ErrorKind::RegimeViolation, "monopoly serves all demand at zero unlicensed capacity");

  Thresholds th;
  th.s0 = x_mono * (margin - s1 * x_mono);
  if (W <= o2) {
    th.c1 = th.c2 = inf;
    th.sc2 = nan;
    return th;
  }
  th.c1 = k * (Q - x_mono) / (W - o2);
  // Unlicensed slope at which the interior delivered price equals W.
  const double a0 = o2 - o1;
  const double B = a0 + 2.0 * s1 * Q - 2.0 * margin;
  const double c0 = 2.0 * s1 * (a0 - margin);
  const double slope = (-B + std::sqrt(B * B - 4.0 * Q * c0)) / (2.0 * Q);
  const double c_star = k / slope;
  if (!(c_star > th.c1)) {
    th.c2 = inf;
    th.sc2 = nan;
    return th;
  }
  th.c2 = c_star;
  const double xw = (W - o2) / slope;
  const double x1 = Q - xw;
  th.sc2 = W * Q - x1 * (o1 + s1 * x1) - xw * W;
  return th;
}

Thresholds closed_form_thresholds(const MarketConfig& market) {
  if (market.incumbent_count() != 1 || market.classes.size() != 1 || !market.classes.front().demand.is_box() ||
      !market.all_linear()) {
    throw Error(ErrorKind::UseGenericPath, "closed-form thresholds need one incumbent, one box class, affine latencies");
  }
  const auto& cls = market.classes.front();
  const auto& lic = *market.providers[market.first_incumbent()].licensed;
  const auto& g = market.unlicensed.latency;
  return closed_form_thresholds(cls.demand.box().valuation, lic.offset, g.offset, lic.slope, g.slope, cls.weight,
                                cls.demand.box().mass);
}

namespace {

enum class Trend { Flat, Decreasing, Increasing };

BreakpointKind transition(Trend a, Trend b) {
  using K = BreakpointKind;
  if (a == Trend::Flat) return b == Trend::Decreasing ? K::FlatToDecreasing : K::FlatToIncreasing;
  if (a == Trend::Decreasing) return b == Trend::Flat ? K::DecreasingToFlat : K::DecreasingToIncreasing;
  return b == Trend::Flat ? K::IncreasingToFlat : K::IncreasingToDecreasing;
}

bool coverage_label(Regime r) {
  return r == Regime::ServeBothTypes || r == Regime::ServeHighOnly || r == Regime::ServeLowOnly ||
         r == Regime::Unserved;
}

double focal_price(const EquilibriumResult& r) {
  // Incumbents are stored by id; the smallest id is a stable choice.
  return r.prices.licensed.empty() ? 0.0 : r.prices.licensed.begin()->second;
}

void check_grid(const std::vector<double>& grid) {
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] >= 0.0) || std::isinf(grid[k])) throw Error(ErrorKind::InvalidConfig, "capacities must be finite and >= 0");
    if (k > 0 && !(grid[k] > grid[k - 1])) throw Error(ErrorKind::InvalidConfig, "capacity grid must be strictly increasing");
  }
}

template <class Build>
SweepResult run_sweep(const std::vector<double>& grid, const SweepOptions& options, Build build) {
  check_grid(grid);
  SweepResult out;
  out.samples.resize(grid.size());
  detail::parallel_for(
      grid.size(),
      [&](std::size_t k) {
        SweepSample& s = out.samples[k];
        s.capacity = grid[k];
        try {
          s.result = build(grid[k]);
          s.result->capacity = grid[k];
        } catch (const std::exception& e) {
          s.error = e.what();
        }
      },
      options.threads);
  out.breakpoints = detect_breakpoints(out.samples, options.jump_tol, options.slope_tol);
  return out;
}

}  // namespace

std::vector<Breakpoint> detect_breakpoints(const std::vector<SweepSample>& samples, double jump_tol,
                                           double slope_tol) {
  std::vector<const SweepSample*> ok;
  for (const auto& s : samples) {
    if (s.result) ok.push_back(&s);
  }
  std::vector<Breakpoint> out;
  if (ok.size() < 3) return out;
  const std::size_t n = ok.size();

  std::vector<Trend> trend(n - 1);
  std::vector<double> price_slope(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double h = ok[k + 1]->capacity - ok[k]->capacity;
    const double s = (ok[k + 1]->result->report.social_welfare - ok[k]->result->report.social_welfare) / h;
    trend[k] = std::abs(s) < slope_tol ? Trend::Flat : (s < 0.0 ? Trend::Decreasing : Trend::Increasing);
    price_slope[k] = std::abs(focal_price(*ok[k + 1]->result) - focal_price(*ok[k]->result)) / h;
  }

  for (std::size_t k = 0; k + 1 < n; ++k) {
    const auto& a = *ok[k]->result;
    const auto& b = *ok[k + 1]->result;
    const double mid = 0.5 * (ok[k]->capacity + ok[k + 1]->capacity);
    if (k > 0 && trend[k] != trend[k - 1]) {
      Breakpoint bp;
      bp.capacity = ok[k]->capacity;
      bp.kind = transition(trend[k - 1], trend[k]);
      bp.lo = ok[k - 1]->capacity;
      bp.hi = ok[k + 1]->capacity;
      out.push_back(bp);
    }
    const double dp = focal_price(b) - focal_price(a);
    const double left = k > 0 ? price_slope[k - 1] : 0.0;
    const double right = k + 2 < n ? price_slope[k + 1] : 0.0;
    if (std::abs(dp) > jump_tol && price_slope[k] > 10.0 * std::max(left, right)) {
      out.push_back({mid, BreakpointKind::PriceJump, ok[k]->capacity, ok[k + 1]->capacity, focal_price(a),
                     focal_price(b), a.regime, b.regime});
    }
    if (a.regime != b.regime && coverage_label(a.regime) && coverage_label(b.regime)) {
      out.push_back({mid, BreakpointKind::RegimeSwitch, ok[k]->capacity, ok[k + 1]->capacity, 0.0, 0.0, a.regime,
                     b.regime});
    }
  }
  return out;
}

SweepResult sweep_capacity(const MarketConfig& market, const std::vector<double>& grid, const SweepOptions& options) {
  SweepResult out = run_sweep(grid, options, [&](double C) { return solve(market.with_capacity(C), options.solve); });
  try {
    out.closed_form = closed_form_thresholds(market);
  } catch (const Error&) {
  }
  return out;
}

SweepResult divided_capacity_sweep(const MarketConfig& market, const std::vector<double>& grid, int incumbents,
                                   const SweepOptions& options) {
  if (incumbents < 1 || static_cast<std::size_t>(incumbents) != market.incumbent_count()) {
    throw Error(ErrorKind::InvalidConfig, "incumbent count does not match the market");
  }
  return run_sweep(grid, options, [&](double C) {
    return solve(divide_capacity_among_incumbents(market, C), options.solve);
  });
}

std::vector<double> default_capacity_grid(int points, double lo, double hi) {
  if (points < 2 || !(lo > 0.0) || !(hi > lo)) throw Error(ErrorKind::InvalidConfig, "log grid needs points >= 2 and 0 < lo < hi");
  std::vector<double> grid{0.0};
  const double a = std::log10(lo), b = std::log10(hi);
  for (int k = 0; k < points; ++k) grid.push_back(std::pow(10.0, a + (b - a) * k / (points - 1)));
  grid[1] = lo;
  grid.back() = hi;
  return grid;
}

std::vector<double> linear_capacity_grid(double lo, double hi, int points) {
  if (points < 1 || lo < 0.0 || (points > 1 && !(hi > lo))) {
    throw Error(ErrorKind::InvalidConfig, "linear grid needs points >= 1 and 0 <= lo < hi");
  }
  std::vector<double> grid;
  for (int k = 0; k < points; ++k) grid.push_back(points == 1 ? lo : lo + (hi - lo) * k / (points - 1));
  return grid;
}

}  // namespace spectrum
