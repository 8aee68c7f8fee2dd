#pragma once

#include <optional>
#include <string_view>

#include "spectrum/model.hpp"
#include "spectrum/wardrop.hpp"

namespace spectrum {

/// Which customers the incumbent's licensed band serves at its best response.
/// Two-class markets get a coverage label; one-class markets get
/// Interior / BoundaryDeliveredW.
enum class Regime {
  ServeBothTypes,
  ServeHighOnly,
  ServeLowOnly,
  BoundaryDeliveredW,
  Interior,
  Unserved,
};

const char* to_string(Regime regime) noexcept;

enum class SearchMethod { ClosedForm, PiecewiseQuadratic, GoldenSection, GridFallback };

const char* to_string(SearchMethod method) noexcept;

struct BestResponse {
  /// +infinity when no price earns positive revenue (Regime::Unserved).
  double price = 0.0;
  double revenue = 0.0;
  Regime regime = Regime::Interior;
  SearchMethod method = SearchMethod::ClosedForm;
  /// Generic path only: whether the unimodality precondition held.
  bool precondition_ok = true;
  /// A second maximizer in a different regime at numerically equal revenue.
  struct Tie {
    double price;
    Regime regime;
  };
  std::optional<Tie> tie;
};

/// Revenue p_i x_i + p_i^w x_i^w of provider `sp` (default: first incumbent)
/// at the given full price profile, with the unlicensed capacity set to `capacity`.
double revenue_at_price(const MarketConfig& market, double capacity, const PriceProfile& prices,
                        std::string_view sp = {});

/// Coverage label of `focal`'s licensed band in the given allocation.
Regime classify_regime(const MarketConfig& market, const PriceProfile& prices, const Allocation& allocation,
                       std::size_t focal);

/// Closed-form best response of a lone incumbent facing one box-demand class
/// with affine latencies, every unlicensed price pinned at zero.
///
/// Up to the capacity at which the shared band absorbs exactly the customers
/// the monopolist leaves unserved, the monopoly price stands. Beyond it the
/// incumbent either sits at the unconstrained optimum of p * x(p) with all
/// customers served, or at the largest price that keeps the delivered price at
/// the valuation, whichever is feasible.
///
/// Throws Error(UseGenericPath) for other market shapes and
/// Error(RegimeViolation) when the monopolist would serve all demand.
BestResponse best_response_homogeneous(const MarketConfig& market, double capacity);

/// Best response of a lone incumbent facing two box-demand classes with
/// affine latencies, unlicensed prices pinned at zero.
///
/// Incumbent revenue is piecewise quadratic in its price, one piece per
/// Wardrop support pattern. Pieces are located by scanning the price axis and
/// bisecting on pattern changes; each concave piece is maximized in closed
/// form and every candidate is re-evaluated through allocate(). Ties go to the
/// lower price; an equal-revenue maximizer in another regime is reported in
/// `tie`.
BestResponse best_response_heterogeneous(const MarketConfig& market, double capacity);

struct GenericSearchOptions {
  double price_tolerance = 1e-9;
  int fallback_points = 2000;
  int refinement_passes = 2;
  int precondition_mesh = 400;
};

/// Best licensed price of `focal` (default: first incumbent) against fixed
/// rival prices, for any latency exponents.
///
/// For a lone box-demand incumbent the precondition is concavity of
/// x * (g(Q - x) - l(x)) on a mesh; otherwise the sampled revenue curve must be
/// unimodal. When it holds, golden-section search on p -> revenue; otherwise
/// a dense grid with refinement passes.
BestResponse best_response_generic(const MarketConfig& market, double capacity, const PriceProfile& rivals,
                                   std::string_view focal = {}, const GenericSearchOptions& options = {});

/// Concavity of x * (g(Q - x) - l(x)) for a lone box-demand incumbent,
/// checked by second differences on `mesh` intervals. Returns nullopt when the
/// market is not of that shape.
std::optional<bool> revenue_concavity_holds(const MarketConfig& market, double capacity, int mesh = 400);

}  // namespace spectrum
