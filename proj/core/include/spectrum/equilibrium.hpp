#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spectrum/best_response.hpp"
#include "spectrum/metrics.hpp"
#include "spectrum/model.hpp"
#include "spectrum/oracle.hpp"
#include "spectrum/wardrop.hpp"

namespace spectrum {

struct Diagnostics {
  /// Solver that produced the result: closed_form, piecewise_quadratic,
  /// symmetric_iteration or best_response_iteration.
  std::string method;
  int iterations = 0;
  double wardrop_residual = 0.0;
  /// Minus the largest unilateral revenue gain found by verification, when run.
  std::optional<double> deviation_margin;
  std::optional<Certificate> certificate;
  std::vector<std::string> warnings;
  /// Common licensed price after each iteration (iterative solvers only).
  std::vector<double> trace;
};

struct EquilibriumResult {
  double capacity = 0.0;
  PriceProfile prices;
  Allocation allocation;
  DeliveredPrices delivered;
  WelfareReport report;
  Regime regime = Regime::Interior;
  /// Equal-revenue alternative best response, when one exists.
  std::optional<BestResponse::Tie> tie;
  Diagnostics diagnostics;
};

struct SolveOptions {
  double damping = 0.5;
  int max_iterations = 10000;
  /// Convergence threshold on successive licensed prices.
  double price_tolerance = 1e-8;
  /// Starting licensed price for iterative solvers; default is half the choke price.
  std::optional<double> initial_price;
  GenericSearchOptions search{};
  /// Attach an oracle certificate (grid deviation search) to the result.
  bool certify = false;
  double certify_resolution = 1e-3;
};

/// One incumbent, entrants, one box-demand class, affine latencies. Closed-form
/// best response with every unlicensed price at zero. Falls back to
/// solve_generic (with a warning) when the closed form does not apply.
EquilibriumResult solve_homogeneous_single(const MarketConfig& market, const SolveOptions& options = {});

/// One incumbent, entrants, two box-demand classes, affine latencies.
EquilibriumResult solve_heterogeneous_single(const MarketConfig& market, const SolveOptions& options = {});

/// N >= 2 incumbents with identical licensed latencies and one customer class.
/// Damped simultaneous best-response iteration on the common licensed price.
/// Throws Error(NonConvergence) with the iteration trace in the message.
EquilibriumResult solve_symmetric_N(const MarketConfig& market, const SolveOptions& options = {});

/// Damped round-robin best-response iteration over every incumbent's licensed
/// price, unlicensed prices at zero, for any market the allocator supports.
EquilibriumResult solve_generic(const MarketConfig& market, const SolveOptions& options = {});

/// Picks the solver matching the market's family.
EquilibriumResult solve(const MarketConfig& market, const SolveOptions& options = {});

/// Builds the result fields (allocation, delivered prices, welfare, residual)
/// for a given profile.
EquilibriumResult evaluate_profile(const MarketConfig& market, const PriceProfile& prices);

struct DeviationReport {
  double max_gain = 0.0;
  std::string deviator;
  PriceKind kind = PriceKind::Licensed;
  double deviation_price = 0.0;
  double max_unlicensed_gain = 0.0;
  /// Every posted unlicensed price is zero.
  bool unlicensed_prices_zero = true;
  /// Set when the band exists but carries no load: whether
  /// lambda_t * g(0) >= P_t(Q_t) holds for every class.
  std::optional<bool> no_service_condition;
  /// Zero unlicensed prices, or an idle band that passes the no-service check.
  bool unlicensed_pricing_consistent = true;
};

/// Brute-force unilateral deviations over licensed and unlicensed price grids.
DeviationReport verify_equilibrium(const MarketConfig& market, const EquilibriumResult& result,
                                   double grid_resolution = 1e-3);

}  // namespace spectrum
