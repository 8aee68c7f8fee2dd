#include "spectrum/presets.hpp"

#include <string>

#include "spectrum/error.hpp"

namespace spectrum {

namespace {

void add_entrants(MarketConfig& m, int entrants) {
  for (int k = 0; k < entrants; ++k) {
    m.providers.push_back(ServiceProvider::entrant(entrants == 1 ? "entrant" : "entrant" + std::to_string(k + 1)));
  }
}

}  // namespace

MarketConfig homogeneous_box_market(const HomogeneousBoxParams& p, double capacity) {
  MarketConfig m;
  m.providers.push_back(ServiceProvider::incumbent("incumbent", {p.licensed_offset, p.licensed_slope, 1.0}));
  add_entrants(m, p.entrants);
  m.unlicensed = UnlicensedBand{capacity, {p.unlicensed_offset, p.kappa, 1.0}};
  m.classes.push_back(CustomerClass{p.weight, DemandSpec{BoxDemand{p.valuation, p.mass}}});
  return m;
}

MarketConfig two_class_box_market(const TwoClassBoxParams& p, double capacity) {
  MarketConfig m;
  m.providers.push_back(ServiceProvider::incumbent("incumbent", {0.0, p.licensed_slope, 1.0}));
  add_entrants(m, p.entrants);
  m.unlicensed = UnlicensedBand{capacity, {0.0, p.kappa, 1.0}};
  m.classes.push_back(CustomerClass{p.high_weight, DemandSpec{BoxDemand{p.high_valuation, p.high_mass}}});
  m.classes.push_back(CustomerClass{p.low_weight, DemandSpec{BoxDemand{p.low_valuation, p.low_mass}}});
  return m;
}

MarketConfig symmetric_linear_market(int incumbents, double beta, double capacity, int entrants) {
  if (incumbents < 1) throw Error(ErrorKind::InvalidConfig, "need at least one incumbent");
  MarketConfig m;
  for (int i = 0; i < incumbents; ++i) {
    m.providers.push_back(ServiceProvider::incumbent("incumbent" + std::to_string(i + 1), {0.0, 1.0, 1.0}));
  }
  add_entrants(m, entrants);
  m.unlicensed = UnlicensedBand{capacity, {0.0, 1.0, 1.0}};
  m.classes.push_back(CustomerClass{1.0, DemandSpec{LinearDemand{1.0, beta}}});
  return m;
}

MarketConfig divide_capacity_among_incumbents(const MarketConfig& market, double capacity) {
  const auto n = static_cast<double>(market.incumbent_count());
  if (n == 0) throw Error(ErrorKind::InvalidConfig, "market has no incumbent");
  MarketConfig out = market;
  for (auto& sp : out.providers) {
    if (sp.licensed) sp.licensed->slope /= 1.0 + capacity / n;
  }
  out.unlicensed.capacity = 0.0;
  return out;
}

}  // namespace spectrum
