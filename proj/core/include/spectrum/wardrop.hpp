#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "spectrum/model.hpp"

namespace spectrum {

/// Announced prices. An incumbent without a licensed entry does not sell
/// licensed service; a provider without an unlicensed entry stays out of the
/// shared band.
struct PriceProfile {
  std::map<std::string, double> licensed;
  std::map<std::string, double> unlicensed;
};

/// Customer masses indexed [provider][class], in market order.
struct Allocation {
  std::vector<std::vector<double>> licensed;
  std::vector<std::vector<double>> unlicensed;

  static Allocation zeros(std::size_t providers, std::size_t classes);

  std::size_t provider_count() const noexcept { return licensed.size(); }
  std::size_t class_count() const noexcept { return licensed.empty() ? 0 : licensed.front().size(); }

  double licensed_load(std::size_t sp) const;     // x_i
  double unlicensed_load(std::size_t sp) const;   // x_i^w
  double unlicensed_total() const;                // X^w
  double unlicensed_class(std::size_t t) const;   // X^{wt}
  double licensed_class(std::size_t t) const;     // sum_i x_i^t
  double served(std::size_t t) const;             // Q_t
};

struct DeliveredPrices {
  std::vector<double> per_class;
};

struct WardropOptions {
  /// Complementarity tolerance for the affine pattern solver.
  double tolerance = 1e-9;
  /// Target accuracy of the delivered-price bisection used for convex latencies.
  double bisection_tolerance = 1e-7;
};

/// Wardrop demand allocation for the announced prices.
///
/// Affine latencies are solved exactly by enumerating support patterns (which
/// bands each class uses, and whether a box class is saturated or priced at its
/// valuation) and solving the induced linear system; the first pattern that
/// satisfies every complementarity condition is returned. Markets with a
/// convex (exponent > 1) latency and a single class are solved by bisection on
/// the delivered price. Unlicensed mass is split equally among the providers
/// posting the lowest unlicensed price.
///
/// Throws Error(NoConsistentPattern) if no pattern is consistent and
/// Error(Unsupported) for two-class markets with a non-affine latency.
Allocation allocate(const MarketConfig& market, const PriceProfile& prices,
                    const WardropOptions& options = {});

/// Single-class allocation by bisection on the common delivered price. Works
/// for any convex latency; used as the fallback route of allocate().
Allocation allocate_by_level(const MarketConfig& market, const PriceProfile& prices,
                             const WardropOptions& options = {});

/// Per class: the cheapest delivered price among the options the class uses,
/// or among all offered options when the class is unserved.
DeliveredPrices delivered_prices(const MarketConfig& market, const PriceProfile& prices,
                                 const Allocation& allocation);

/// Largest violation of the Wardrop complementarity conditions. Zero (up to
/// solver tolerance) for any allocate() output.
double wardrop_residual(const MarketConfig& market, const PriceProfile& prices,
                        const Allocation& allocation);

/// Profile where every provider posts unlicensed price 0 and each incumbent
/// posts `licensed_price` (used by the equilibrium solvers).
PriceProfile uniform_profile(const MarketConfig& market, double licensed_price);

}  // namespace spectrum
