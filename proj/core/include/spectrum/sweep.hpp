#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spectrum/equilibrium.hpp"
#include "spectrum/model.hpp"

namespace spectrum {

enum class BreakpointKind {
  FlatToDecreasing,
  FlatToIncreasing,
  DecreasingToFlat,
  DecreasingToIncreasing,
  IncreasingToFlat,
  IncreasingToDecreasing,
  PriceJump,
  RegimeSwitch,
};

const char* to_string(BreakpointKind kind) noexcept;

struct Breakpoint {
  /// Shared sample for welfare-slope changes, interval midpoint for jumps and switches.
  double capacity = 0.0;
  BreakpointKind kind = BreakpointKind::PriceJump;
  /// Bracketing samples.
  double lo = 0.0;
  double hi = 0.0;
  /// PriceJump: price before and after. RegimeSwitch: unused.
  double before = 0.0;
  double after = 0.0;
  /// RegimeSwitch and PriceJump: regime labels on either side.
  Regime regime_before = Regime::Interior;
  Regime regime_after = Regime::Interior;
};

/// Homogeneous box-market thresholds. c2 is infinite (and sc2, efficiency NaN)
/// when the delivered price never falls to the valuation after c1.
struct Thresholds {
  double c1 = 0.0;
  double c2 = 0.0;
  double s0 = 0.0;
  double sc2 = 0.0;

  double efficiency() const { return sc2 / s0; }
};

/// Throws Error(RegimeViolation) when the monopoly would serve more than Q.
Thresholds closed_form_thresholds(double W, double T1, double T2, double b, double kappa, double weight = 1.0,
                                  double mass = 1.0);
/// Same, read from a one-incumbent, one-box-class, affine market.
/// Throws Error(UseGenericPath) for other shapes.
Thresholds closed_form_thresholds(const MarketConfig& market);

struct SweepSample {
  double capacity = 0.0;
  std::optional<EquilibriumResult> result;
  std::string error;
};

struct SweepResult {
  std::vector<SweepSample> samples;
  std::vector<Breakpoint> breakpoints;
  std::optional<Thresholds> closed_form;
};

struct SweepOptions {
  double jump_tol = 1e-2;
  double slope_tol = 1e-6;
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 0;
  SolveOptions solve{};
};

/// Solves the equilibrium at every grid capacity (concurrently; output does not
/// depend on scheduling). Per-sample failures are recorded and skipped.
SweepResult sweep_capacity(const MarketConfig& market, const std::vector<double>& grid,
                           const SweepOptions& options = {});

/// Welfare-slope class changes (|dSW/dC| < slope_tol is flat), price jumps
/// (|dp| > jump_tol and a price slope over ten times both neighbours') and
/// coverage-label switches. Failed samples are ignored. Fewer than three
/// usable samples give no breakpoints.
std::vector<Breakpoint> detect_breakpoints(const std::vector<SweepSample>& samples, double jump_tol = 1e-2,
                                           double slope_tol = 1e-6);

/// Counterfactual sweep: at each grid capacity C the unlicensed band is removed
/// and every incumbent's licensed slope is divided by 1 + C / N. N must equal
/// the incumbent count. Samples are labelled with C.
SweepResult divided_capacity_sweep(const MarketConfig& market, const std::vector<double>& grid, int incumbents,
                                   const SweepOptions& options = {});

/// C = 0 followed by `points` log-spaced capacities on [lo, hi].
std::vector<double> default_capacity_grid(int points = 400, double lo = 1e-3, double hi = 10.0);

/// `points` evenly spaced capacities on [lo, hi].
std::vector<double> linear_capacity_grid(double lo, double hi, int points);

}  // namespace spectrum
