#pragma once

#include <map>
#include <string>

#include "spectrum/model.hpp"
#include "spectrum/wardrop.hpp"

namespace spectrum {

struct WelfareReport {
  double social_welfare = 0.0;
  double consumer_surplus = 0.0;
  std::map<std::string, double> revenues;
  double total_congestion_cost = 0.0;

  double total_revenue() const;
};

/// Gross consumption value minus weighted congestion cost over all bands.
double social_welfare(const MarketConfig& market, const Allocation& allocation);

/// Weighted congestion cost sum_t lambda_t * (licensed + unlicensed cost borne by class t).
double congestion_cost(const MarketConfig& market, const Allocation& allocation);

/// Sum over classes of the area between inverse demand and the delivered price.
double consumer_surplus(const MarketConfig& market, const Allocation& allocation,
                        const DeliveredPrices& delivered);

/// p_i x_i + p_i^w x_i^w per provider (every provider appears, entrants included).
std::map<std::string, double> revenues(const MarketConfig& market, const PriceProfile& prices,
                                       const Allocation& allocation);

WelfareReport welfare_report(const MarketConfig& market, const PriceProfile& prices,
                             const Allocation& allocation, const DeliveredPrices& delivered);

}  // namespace spectrum
