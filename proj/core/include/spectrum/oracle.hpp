#pragma once

#include <string>
#include <string_view>

#include "spectrum/model.hpp"
#include "spectrum/wardrop.hpp"

namespace spectrum {

/// Uniform price grid on [lo, hi]. Each refinement pass re-grids the two cells
/// around the current argmax with the same point count.
struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  int points = 10001;
  int refinement_passes = 0;

  double step() const { return (hi - lo) / (points - 1); }
  /// Grid with cells no wider than `resolution`.
  static GridSpec with_resolution(double lo, double hi, double resolution, int refinement_passes = 0);
};

enum class PriceKind { Licensed, Unlicensed };

const char* to_string(PriceKind kind) noexcept;

struct GridOptimum {
  double price = 0.0;
  double revenue = 0.0;
};

/// Exhaustive search over one of `sp`'s prices (default: first incumbent's
/// licensed price) with every other price held at `rivals`. Lowest price wins
/// ties. Grid points are evaluated concurrently.
GridOptimum grid_best_response(const MarketConfig& market, double capacity, const PriceProfile& rivals,
                               const GridSpec& grid, std::string_view sp = {},
                               PriceKind kind = PriceKind::Licensed);

/// Quantized Wardrop allocation by greedy descent of the congestion-game
/// potential. Each class's mass (Q, or A / beta) is cut into `mesh` quanta;
/// single-quantum moves between options (including the outside option) and
/// paired cross-class swaps are applied while any of them strictly lowers the
/// potential. Ties between equally good targets go to the option currently
/// holding less of that class, which splits mass evenly among identical
/// providers.
Allocation discretized_wardrop(const MarketConfig& market, const PriceProfile& prices, int mesh);

struct Certificate {
  double max_gain = 0.0;
  std::string worst_deviator;
  PriceKind kind = PriceKind::Licensed;
  double deviation_price = 0.0;
  /// Best gain found among unlicensed-price deviations alone.
  double max_unlicensed_gain = 0.0;
  /// Grid resolution the certificate was computed at.
  double resolution = 0.0;
};

/// Unilateral deviation search for every provider over its licensed price (if
/// any) and its unlicensed price (if the band exists), each on a grid spanning
/// [0, highest choke price] at `resolution`.
Certificate certify_equilibrium(const MarketConfig& market, const PriceProfile& prices, double resolution = 1e-3,
                                int refinement_passes = 0);

}  // namespace spectrum
