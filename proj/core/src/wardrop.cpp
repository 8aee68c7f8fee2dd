#include "spectrum/wardrop.hpp"

// GCC flags Eigen's fixed-capacity storage as maybe-uninitialized.
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic ignored "-Wmaybe-uninitialized"
#endif
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "offers.hpp"
#include "spectrum/error.hpp"

namespace spectrum {

Allocation Allocation::zeros(std::size_t providers, std::size_t classes) {
  Allocation a;
  a.licensed.assign(providers, std::vector<double>(classes, 0.0));
  a.unlicensed.assign(providers, std::vector<double>(classes, 0.0));
  return a;
}

double Allocation::licensed_load(std::size_t sp) const {
  double s = 0.0;
  for (double v : licensed.at(sp)) s += v;
  return s;
}

double Allocation::unlicensed_load(std::size_t sp) const {
  double s = 0.0;
  for (double v : unlicensed.at(sp)) s += v;
  return s;
}

double Allocation::unlicensed_total() const {
  double s = 0.0;
  for (std::size_t i = 0; i < unlicensed.size(); ++i) s += unlicensed_load(i);
  return s;
}

double Allocation::unlicensed_class(std::size_t t) const {
  double s = 0.0;
  for (const auto& row : unlicensed) s += row.at(t);
  return s;
}

double Allocation::licensed_class(std::size_t t) const {
  double s = 0.0;
  for (const auto& row : licensed) s += row.at(t);
  return s;
}

double Allocation::served(std::size_t t) const { return licensed_class(t) + unlicensed_class(t); }

namespace detail {

std::vector<Offer> collect_offers(const MarketConfig& market, const PriceProfile& prices) {
  auto check_price = [](const std::string& id, double p) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorKind::InvalidConfig, "price for '" + id + "' must be finite and nonnegative");
    }
  };
  std::vector<Offer> offers;
  for (std::size_t i = 0; i < market.providers.size(); ++i) {
    const auto& sp = market.providers[i];
    if (auto it = prices.licensed.find(sp.id); it != prices.licensed.end()) {
      if (!sp.is_incumbent()) {
        throw Error(ErrorKind::NoLicensedBand, "entrant '" + sp.id + "' cannot post a licensed price");
      }
      check_price(sp.id, it->second);
      offers.push_back({i, false, it->second});
    }
  }
  if (market.unlicensed.present()) {
    for (std::size_t i = 0; i < market.providers.size(); ++i) {
      const auto& sp = market.providers[i];
      if (auto it = prices.unlicensed.find(sp.id); it != prices.unlicensed.end()) {
        check_price(sp.id, it->second);
        offers.push_back({i, true, it->second});
      }
    }
  }
  for (const auto& [id, p] : prices.licensed) market.index_of(id);
  for (const auto& [id, p] : prices.unlicensed) market.index_of(id);
  return offers;
}

double offer_mass(const Offer& offer, const Allocation& allocation, std::size_t cls) {
  return offer.unlicensed ? allocation.unlicensed[offer.provider][cls] : allocation.licensed[offer.provider][cls];
}

double offer_delivered(const MarketConfig& market, const Offer& offer, const Allocation& allocation,
                       std::size_t cls) {
  const double weight = market.classes[cls].weight;
  if (offer.unlicensed) {
    return offer.price + weight * market.unlicensed.effective()(allocation.unlicensed_total());
  }
  return offer.price + weight * (*market.providers[offer.provider].licensed)(allocation.licensed_load(offer.provider));
}

}  // namespace detail

namespace {

using detail::Offer;

/// A band as seen by customers: the unlicensed offers collapse into one
/// option priced at the lowest posted unlicensed price.
struct Option {
  double price = 0.0;
  LatencySpec latency;
  std::vector<std::size_t> providers;  // licensed: one; unlicensed: tied lowest-price posters
  bool unlicensed = false;
};

std::vector<Option> build_options(const MarketConfig& market, const PriceProfile& prices) {
  const auto offers = detail::collect_offers(market, prices);
  std::vector<Option> options;
  double best_unlicensed = std::numeric_limits<double>::infinity();
  for (const auto& o : offers) {
    if (o.unlicensed) {
      best_unlicensed = std::min(best_unlicensed, o.price);
    } else {
      options.push_back({o.price, *market.providers[o.provider].licensed, {o.provider}, false});
    }
  }
  if (std::isfinite(best_unlicensed)) {
    Option u{best_unlicensed, market.unlicensed.effective(), {}, true};
    for (const auto& o : offers) {
      if (o.unlicensed && o.price == best_unlicensed) u.providers.push_back(o.provider);
    }
    options.push_back(std::move(u));
  }
  return options;
}

/// Scatter per-option class masses back onto providers.
Allocation scatter(const MarketConfig& market, const std::vector<Option>& options,
                   const std::vector<std::vector<double>>& mass /* [option][class] */) {
  auto out = Allocation::zeros(market.providers.size(), market.classes.size());
  for (std::size_t e = 0; e < options.size(); ++e) {
    const auto& opt = options[e];
    const double share = 1.0 / static_cast<double>(opt.providers.size());
    for (std::size_t t = 0; t < market.classes.size(); ++t) {
      const double m = std::max(mass[e][t], 0.0);
      for (std::size_t sp : opt.providers) {
        (opt.unlicensed ? out.unlicensed : out.licensed)[sp][t] = opt.unlicensed ? m * share : m;
      }
    }
  }
  return out;
}

enum class DemandMode { Unserved, Interior, Saturated, Elastic };

struct ClassMode {
  unsigned mask = 0;
  DemandMode demand = DemandMode::Unserved;
};

constexpr int kMaxVars = 40;
constexpr double kStrictTolerance = 1e-12;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxVars, kMaxVars>;
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxVars, 1>;

struct PatternSolver {
  const MarketConfig& market;
  const std::vector<Option>& options;
  double tol;

  std::size_t classes() const { return market.classes.size(); }

  // Returns true and fills `mass` when the pattern yields a Wardrop allocation.
  bool solve(const std::vector<ClassMode>& modes, std::vector<std::vector<double>>& mass) const {
    const std::size_t E = options.size();
    const std::size_t T = classes();
    int var_index[8 * sizeof(unsigned)][2];
    int mu_index[2] = {-1, -1};
    int n = 0;
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t e = 0; e < E; ++e) {
        var_index[e][t] = (modes[t].mask >> e) & 1u ? n++ : -1;
      }
    }
    for (std::size_t t = 0; t < T; ++t) {
      if (modes[t].demand != DemandMode::Unserved) mu_index[t] = n++;
    }
    if (n == 0) {
      for (auto& row : mass) std::fill(row.begin(), row.end(), 0.0);
      return check(modes, mass, mu_index, Vector{});
    }

    Matrix A = Matrix::Zero(n, n);
    Vector b = Vector::Zero(n);
    int row = 0;
    for (std::size_t t = 0; t < T; ++t) {
      const double w = market.classes[t].weight;
      for (std::size_t e = 0; e < E; ++e) {
        if (var_index[e][t] < 0) continue;
        const auto& lat = options[e].latency;
        for (std::size_t s = 0; s < T; ++s) {
          if (var_index[e][s] >= 0) A(row, var_index[e][s]) = w * lat.slope;
        }
        A(row, mu_index[t]) = -1.0;
        b(row) = -options[e].price - w * lat.offset;
        ++row;
      }
    }
    for (std::size_t t = 0; t < T; ++t) {
      const auto& demand = market.classes[t].demand;
      switch (modes[t].demand) {
        case DemandMode::Unserved:
          continue;
        case DemandMode::Interior:
          A(row, mu_index[t]) = 1.0;
          b(row) = demand.box().valuation;
          break;
        case DemandMode::Saturated:
          for (std::size_t e = 0; e < E; ++e) {
            if (var_index[e][t] >= 0) A(row, var_index[e][t]) = 1.0;
          }
          b(row) = demand.box().mass;
          break;
        case DemandMode::Elastic:
          A(row, mu_index[t]) = 1.0;
          for (std::size_t e = 0; e < E; ++e) {
            if (var_index[e][t] >= 0) A(row, var_index[e][t]) = demand.linear().elasticity;
          }
          b(row) = demand.linear().intercept;
          break;
      }
      ++row;
    }

    Eigen::FullPivLU<Matrix> lu(A);
    if (lu.rank() < n) return false;
    const Vector x = lu.solve(b);

    for (std::size_t e = 0; e < E; ++e) {
      for (std::size_t t = 0; t < T; ++t) {
        mass[e][t] = var_index[e][t] >= 0 ? x(var_index[e][t]) : 0.0;
      }
    }
    return check(modes, mass, mu_index, x);
  }

  bool check(const std::vector<ClassMode>& modes, const std::vector<std::vector<double>>& mass,
             const int* mu_index, const Vector& x) const {
    const std::size_t E = options.size();
    const std::size_t T = classes();
    double loads[8 * sizeof(unsigned)];
    for (std::size_t e = 0; e < E; ++e) {
      loads[e] = 0.0;
      for (std::size_t t = 0; t < T; ++t) {
        if (mass[e][t] < -tol) return false;
        loads[e] += mass[e][t];
      }
    }
    for (std::size_t t = 0; t < T; ++t) {
      const auto& cls = market.classes[t];
      const auto mode = modes[t].demand;
      double served = 0.0;
      for (std::size_t e = 0; e < E; ++e) served += mass[e][t];
      double level = 0.0;
      if (mode == DemandMode::Unserved) {
        level = cls.demand.choke_price();
      } else {
        level = x(mu_index[t]);
        const double slack = tol * std::max(1.0, std::abs(level));
        if (mode == DemandMode::Interior && served > cls.demand.box().mass + tol) return false;
        if (mode == DemandMode::Saturated && level > cls.demand.box().valuation + slack) return false;
        if (mode == DemandMode::Elastic && level < -slack) return false;
      }
      const double slack = tol * std::max(1.0, std::abs(level));
      for (std::size_t e = 0; e < E; ++e) {
        if ((modes[t].mask >> e) & 1u) continue;
        const double delivered = options[e].price + cls.weight * options[e].latency(std::max(loads[e], 0.0));
        if (delivered < level - slack) return false;
      }
    }
    return true;
  }
};

std::vector<ClassMode> modes_for(const CustomerClass& cls, std::size_t options) {
  std::vector<ClassMode> out{{0u, DemandMode::Unserved}};
  const unsigned full = (1u << options) - 1u;
  for (unsigned mask = full; mask >= 1u; --mask) {
    if (cls.demand.is_box()) {
      out.push_back({mask, DemandMode::Saturated});
      out.push_back({mask, DemandMode::Interior});
    } else {
      out.push_back({mask, DemandMode::Elastic});
    }
  }
  return out;
}

Allocation allocate_affine(const MarketConfig& market, const std::vector<Option>& options,
                           const WardropOptions& opts) {
  const std::size_t E = options.size();
  const std::size_t T = market.classes.size();
  if (E * T + T > static_cast<std::size_t>(kMaxVars) || E > 16) {
    throw Error(ErrorKind::Unsupported, "market too large for support-pattern enumeration");
  }
  std::vector<std::vector<ClassMode>> per_class;
  for (const auto& cls : market.classes) per_class.push_back(modes_for(cls, E));

  // A near-exact pass first, so a pattern that is only feasible within the
  // looser tolerance never shadows the exact one; then the stated tolerance.
  std::vector<std::vector<double>> mass(E, std::vector<double>(T, 0.0));
  std::vector<ClassMode> modes(T);
  for (double tol : {std::min(opts.tolerance, kStrictTolerance), opts.tolerance}) {
    PatternSolver solver{market, options, tol};
    std::vector<std::size_t> digit(T, 0);
    while (true) {
      for (std::size_t t = 0; t < T; ++t) modes[t] = per_class[t][digit[t]];
      if (solver.solve(modes, mass)) return scatter(market, options, mass);
      std::size_t t = 0;
      while (t < T && ++digit[t] == per_class[t].size()) digit[t++] = 0;
      if (t == T) break;
    }
    if (tol >= opts.tolerance) break;
  }
  throw Error(ErrorKind::NoConsistentPattern,
              "no support pattern satisfies the Wardrop conditions (solver bug or degenerate input)");
}

// Bisection runs to near machine precision, well inside bisection_tolerance.
constexpr double kLevelResolution = 1e-15;

Allocation allocate_level(const MarketConfig& market, const std::vector<Option>& options,
                          const WardropOptions& opts) {
  if (!(opts.bisection_tolerance > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "bisection tolerance must be positive");
  }
  if (market.classes.size() != 1) {
    throw Error(ErrorKind::Unsupported, "delivered-price bisection handles a single customer class");
  }
  const auto& cls = market.classes[0];
  const double w = cls.weight;
  const std::size_t E = options.size();
  std::vector<std::vector<double>> mass(E, std::vector<double>(1, 0.0));
  if (E == 0) return scatter(market, options, mass);

  auto load_at = [&](std::size_t e, double level) {
    return options[e].latency.inverse((level - options[e].price) / w);
  };
  auto supply = [&](double level) {
    double s = 0.0;
    for (std::size_t e = 0; e < E; ++e) s += load_at(e, level);
    return s;
  };

  double floor_level = std::numeric_limits<double>::infinity();
  for (const auto& o : options) floor_level = std::min(floor_level, o.price + w * o.latency.offset);
  const double choke = cls.demand.choke_price();
  if (floor_level >= choke) return scatter(market, options, mass);

  double level = choke;
  if (cls.demand.is_box()) {
    const double cap = cls.demand.box().mass;
    if (supply(choke) > cap) {
      double lo = floor_level, hi = choke;
      for (int it = 0; it < 400 && hi - lo > kLevelResolution * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (supply(mid) > cap ? hi : lo) = mid;
      }
      level = 0.5 * (lo + hi);
    }
  } else {
    const auto& lin = cls.demand.linear();
    auto excess = [&](double l) { return supply(l) - std::max(lin.intercept - l, 0.0) / lin.elasticity; };
    double lo = floor_level, hi = choke;
    for (int it = 0; it < 400 && hi - lo > kLevelResolution * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (excess(mid) > 0.0 ? hi : lo) = mid;
    }
    level = 0.5 * (lo + hi);
  }
  for (std::size_t e = 0; e < E; ++e) mass[e][0] = load_at(e, level);
  return scatter(market, options, mass);
}

}  // namespace

Allocation allocate(const MarketConfig& market, const PriceProfile& prices, const WardropOptions& options) {
  const auto opts = build_options(market, prices);
  bool linear = true;
  for (const auto& o : opts) linear = linear && o.latency.is_linear();
  if (linear) return allocate_affine(market, opts, options);
  if (market.classes.size() == 1) return allocate_level(market, opts, options);
  throw Error(ErrorKind::Unsupported, "two-class markets require affine latencies");
}

Allocation allocate_by_level(const MarketConfig& market, const PriceProfile& prices, const WardropOptions& options) {
  return allocate_level(market, build_options(market, prices), options);
}

DeliveredPrices delivered_prices(const MarketConfig& market, const PriceProfile& prices,
                                 const Allocation& allocation) {
  const auto offers = detail::collect_offers(market, prices);
  DeliveredPrices out;
  for (std::size_t t = 0; t < market.classes.size(); ++t) {
    const bool served = allocation.served(t) > detail::kMassEps;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& o : offers) {
      if (served && detail::offer_mass(o, allocation, t) <= detail::kMassEps) continue;
      best = std::min(best, detail::offer_delivered(market, o, allocation, t));
    }
    out.per_class.push_back(best);
  }
  return out;
}

double wardrop_residual(const MarketConfig& market, const PriceProfile& prices, const Allocation& allocation) {
  const auto offers = detail::collect_offers(market, prices);
  double worst = 0.0;

  // Mass sitting on options nobody offers.
  for (std::size_t i = 0; i < allocation.provider_count(); ++i) {
    for (std::size_t t = 0; t < allocation.class_count(); ++t) {
      const double lic = allocation.licensed[i][t];
      const double unl = allocation.unlicensed[i][t];
      worst = std::max({worst, -lic, -unl});
      const bool lic_offered = std::any_of(offers.begin(), offers.end(),
                                           [&](const Offer& o) { return o.provider == i && !o.unlicensed; });
      const bool unl_offered = std::any_of(offers.begin(), offers.end(),
                                           [&](const Offer& o) { return o.provider == i && o.unlicensed; });
      if (!lic_offered) worst = std::max(worst, lic);
      if (!unl_offered) worst = std::max(worst, unl);
    }
  }

  for (std::size_t t = 0; t < market.classes.size(); ++t) {
    const auto& demand = market.classes[t].demand;
    double cheapest = std::numeric_limits<double>::infinity();
    for (const auto& o : offers) cheapest = std::min(cheapest, detail::offer_delivered(market, o, allocation, t));
    for (const auto& o : offers) {
      if (detail::offer_mass(o, allocation, t) > detail::kMassEps) {
        worst = std::max(worst, detail::offer_delivered(market, o, allocation, t) - cheapest);
      }
    }
    const double served = allocation.served(t);
    const bool any = served > detail::kMassEps;
    if (demand.is_box()) {
      const auto& box = demand.box();
      worst = std::max(worst, served - box.mass);
      if (served < box.mass - detail::kMassEps) worst = std::max(worst, box.valuation - cheapest);
      if (any) worst = std::max(worst, cheapest - box.valuation);
    } else if (any) {
      worst = std::max(worst, std::abs(cheapest - demand.inverse(served)));
    } else {
      worst = std::max(worst, demand.choke_price() - cheapest);
    }
  }
  return std::max(worst, 0.0);
}

PriceProfile uniform_profile(const MarketConfig& market, double licensed_price) {
  PriceProfile p;
  for (const auto& sp : market.providers) {
    if (sp.is_incumbent()) p.licensed[sp.id] = licensed_price;
    p.unlicensed[sp.id] = 0.0;
  }
  return p;
}

}  // namespace spectrum
