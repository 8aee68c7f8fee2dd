#include "spectrum/metrics.hpp"

#include <cmath>

namespace spectrum {

double WelfareReport::total_revenue() const {
  double s = 0.0;
  for (const auto& [id, r] : revenues) s += r;
  return s;
}

double congestion_cost(const MarketConfig& market, const Allocation& allocation) {
  double cost = 0.0;
  for (std::size_t i = 0; i < market.providers.size(); ++i) {
    const auto& sp = market.providers[i];
    if (!sp.licensed) continue;
    const double latency = (*sp.licensed)(allocation.licensed_load(i));
    for (std::size_t t = 0; t < market.classes.size(); ++t) {
      cost += market.classes[t].weight * allocation.licensed[i][t] * latency;
    }
  }
  if (market.unlicensed.present()) {
    const double g = market.unlicensed.effective()(allocation.unlicensed_total());
    for (std::size_t t = 0; t < market.classes.size(); ++t) {
      cost += market.classes[t].weight * g * allocation.unlicensed_class(t);
    }
  }
  return cost;
}

double social_welfare(const MarketConfig& market, const Allocation& allocation) {
  double gross = 0.0;
  for (std::size_t t = 0; t < market.classes.size(); ++t) {
    gross += market.classes[t].demand.integral(allocation.served(t));
  }
  return gross - congestion_cost(market, allocation);
}

double consumer_surplus(const MarketConfig& market, const Allocation& allocation,
                        const DeliveredPrices& delivered) {
  double cs = 0.0;
  for (std::size_t t = 0; t < market.classes.size(); ++t) {
    const double q = allocation.served(t);
    if (q <= 0.0 || !std::isfinite(delivered.per_class.at(t))) continue;
    cs += market.classes[t].demand.integral(q) - delivered.per_class[t] * q;
  }
  return cs;
}

std::map<std::string, double> revenues(const MarketConfig& market, const PriceProfile& prices,
                                       const Allocation& allocation) {
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < market.providers.size(); ++i) {
    const auto& id = market.providers[i].id;
    double r = 0.0;
    if (auto it = prices.licensed.find(id); it != prices.licensed.end()) {
      r += it->second * allocation.licensed_load(i);
    }
    if (auto it = prices.unlicensed.find(id); it != prices.unlicensed.end()) {
      r += it->second * allocation.unlicensed_load(i);
    }
    out[id] = r;
  }
  return out;
}

WelfareReport welfare_report(const MarketConfig& market, const PriceProfile& prices,
                             const Allocation& allocation, const DeliveredPrices& delivered) {
  WelfareReport r;
  r.social_welfare = social_welfare(market, allocation);
  r.consumer_surplus = consumer_surplus(market, allocation, delivered);
  r.revenues = revenues(market, prices, allocation);
  r.total_congestion_cost = congestion_cost(market, allocation);
  return r;
}

}  // namespace spectrum
