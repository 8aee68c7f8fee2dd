#pragma once

#include <cstddef>
#include <vector>

#include "spectrum/model.hpp"
#include "spectrum/wardrop.hpp"

namespace spectrum::detail {

/// A (provider, band) pair with an announced price.
struct Offer {
  std::size_t provider = 0;
  bool unlicensed = false;
  double price = 0.0;
};

/// Every priced (provider, band) option available to customers. Unlicensed
/// offers are dropped when the band is absent. Throws on negative or
/// non-finite prices and on licensed prices for entrants.
std::vector<Offer> collect_offers(const MarketConfig& market, const PriceProfile& prices);

/// price + weight * latency(load) for the offer at the given allocation.
double offer_delivered(const MarketConfig& market, const Offer& offer, const Allocation& allocation,
                       std::size_t cls);

double offer_mass(const Offer& offer, const Allocation& allocation, std::size_t cls);

inline constexpr double kMassEps = 1e-12;

}  // namespace spectrum::detail
