#include "spectrum/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "offers.hpp"
#include "parallel.hpp"
#include "spectrum/error.hpp"
#include "spectrum/metrics.hpp"

namespace spectrum {

GridSpec GridSpec::with_resolution(double lo, double hi, double resolution, int refinement_passes) {
  if (!(resolution > 0.0) || !(hi > lo)) throw Error(ErrorKind::InvalidConfig, "grid needs lo < hi and resolution > 0");
  const int points = static_cast<int>(std::ceil((hi - lo) / resolution - 1e-9)) + 1;
  return {lo, hi, std::max(points, 2), refinement_passes};
}

const char* to_string(PriceKind kind) noexcept { return kind == PriceKind::Licensed ? "licensed" : "unlicensed"; }

namespace {

double provider_revenue(const MarketConfig& m, const PriceProfile& prices, std::size_t i) {
  const Allocation a = allocate(m, prices);
  return revenues(m, prices, a).at(m.providers[i].id);
}

GridOptimum scan(const MarketConfig& m, PriceProfile base, std::size_t i, PriceKind kind, double lo, double hi,
                 int points) {
  std::vector<double> rev(points);
  const std::string& id = m.providers[i].id;
  detail::parallel_for(static_cast<std::size_t>(points), [&](std::size_t k) {
    PriceProfile p = base;
    const double price = lo + (hi - lo) * static_cast<double>(k) / (points - 1);
    (kind == PriceKind::Licensed ? p.licensed : p.unlicensed)[id] = price;
    rev[k] = provider_revenue(m, p, i);
  });
  std::size_t best = 0;
  for (std::size_t k = 1; k < rev.size(); ++k) {
    if (rev[k] > rev[best]) best = k;
  }
  return {lo + (hi - lo) * static_cast<double>(best) / (points - 1), rev[best]};
}

}  // namespace

GridOptimum grid_best_response(const MarketConfig& market, double capacity, const PriceProfile& rivals,
                               const GridSpec& grid, std::string_view sp, PriceKind kind) {
  if (grid.points < 2 || !(grid.hi > grid.lo) || grid.refinement_passes < 0) {
    throw Error(ErrorKind::InvalidConfig, "grid needs lo < hi, points >= 2 and refinement_passes >= 0");
  }
  const MarketConfig m = market.with_capacity(capacity);
  const std::size_t i = sp.empty() ? m.first_incumbent() : m.index_of(sp);
  if (kind == PriceKind::Licensed && !m.providers[i].is_incumbent()) {
    throw Error(ErrorKind::NoLicensedBand, "'" + m.providers[i].id + "' has no licensed band");
  }
  GridOptimum best = scan(m, rivals, i, kind, grid.lo, grid.hi, grid.points);
  double cell = grid.step();
  for (int pass = 0; pass < grid.refinement_passes; ++pass) {
    const double lo = std::max(grid.lo, best.price - cell), hi = std::min(grid.hi, best.price + cell);
    const GridOptimum fine = scan(m, rivals, i, kind, lo, hi, grid.points);
    if (fine.revenue > best.revenue || (fine.revenue == best.revenue && fine.price < best.price)) best = fine;
    cell = (hi - lo) / (grid.points - 1);
  }
  return best;
}

namespace {

struct Descent {
  const MarketConfig& m;
  std::vector<detail::Offer> offers;
  std::vector<double> quantum;              // per class
  std::vector<std::vector<long>> count;     // [class][option]; last option = outside
  std::size_t outside = 0;

  double potential() const {
    const std::size_t T = m.classes.size();
    std::vector<double> lic_load(m.providers.size(), 0.0);
    double xw = 0.0;
    double phi = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const double lambda = m.classes[t].weight;
      double served = 0.0;
      for (std::size_t e = 0; e < offers.size(); ++e) {
        const double y = static_cast<double>(count[t][e]) * quantum[t];
        served += y;
        phi += offers[e].price / lambda * y;
        if (offers[e].unlicensed) {
          xw += y;
        } else {
          lic_load[offers[e].provider] += y;
        }
      }
      phi -= m.classes[t].demand.integral(served) / lambda;
    }
    for (std::size_t i = 0; i < m.providers.size(); ++i) {
      if (lic_load[i] > 0.0) phi += m.providers[i].licensed->integral(lic_load[i]);
    }
    if (xw > 0.0) phi += m.unlicensed.effective().integral(xw);
    return phi;
  }
};

}  // namespace

Allocation discretized_wardrop(const MarketConfig& market, const PriceProfile& prices, int mesh) {
  if (mesh < 1) throw Error(ErrorKind::InvalidConfig, "mesh must be positive");
  Descent d{market, detail::collect_offers(market, prices), {}, {}, 0};
  const std::size_t T = market.classes.size();
  const std::size_t K = d.offers.size();
  d.outside = K;
  for (const auto& c : market.classes) d.quantum.push_back(c.demand.max_mass() / mesh);
  d.count.assign(T, std::vector<long>(K + 1, 0));
  for (auto& row : d.count) row[K] = mesh;

  constexpr double kStrict = -1e-15;
  double phi = d.potential();
  for (;;) {
    double best_delta = 0.0;
    std::size_t bt = 0, ba = 0, bb = 0;
    bool found = false;
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t a = 0; a <= K; ++a) {
        if (d.count[t][a] == 0) continue;
        for (std::size_t b = 0; b <= K; ++b) {
          if (a == b) continue;
          --d.count[t][a];
          ++d.count[t][b];
          const double delta = d.potential() - phi;
          ++d.count[t][a];
          --d.count[t][b];
          if (delta >= kStrict * std::max(1.0, std::abs(phi))) continue;
          const bool better = !found || delta < best_delta ||
                              (delta == best_delta && bt == t && d.count[t][b] < d.count[t][bb]);
          if (better) {
            found = true;
            best_delta = delta;
            bt = t;
            ba = a;
            bb = b;
          }
        }
      }
    }
    if (found) {
      --d.count[bt][ba];
      ++d.count[bt][bb];
      phi += best_delta;
      phi = d.potential();
      continue;
    }
    // No single move helps; try exchanging one quantum of two classes
    // between two options.
    for (std::size_t t = 0; t < T && !found; ++t) {
      for (std::size_t s = t + 1; s < T && !found; ++s) {
        for (std::size_t a = 0; a <= K && !found; ++a) {
          for (std::size_t b = 0; b <= K && !found; ++b) {
            if (a == b || d.count[t][a] == 0 || d.count[s][b] == 0) continue;
            --d.count[t][a];
            ++d.count[t][b];
            --d.count[s][b];
            ++d.count[s][a];
            const double next = d.potential();
            if (next - phi < kStrict * std::max(1.0, std::abs(phi))) {
              phi = next;
              found = true;
            } else {
              ++d.count[t][a];
              --d.count[t][b];
              ++d.count[s][b];
              --d.count[s][a];
            }
          }
        }
      }
    }
    if (!found) break;
  }

  Allocation out = Allocation::zeros(market.providers.size(), T);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t e = 0; e < K; ++e) {
      const double y = static_cast<double>(d.count[t][e]) * d.quantum[t];
      auto& cell = d.offers[e].unlicensed ? out.unlicensed : out.licensed;
      cell[d.offers[e].provider][t] += y;
    }
  }
  return out;
}

Certificate certify_equilibrium(const MarketConfig& market, const PriceProfile& prices, double resolution,
                                int refinement_passes) {
  Certificate cert;
  cert.resolution = resolution;
  double hi = 0.0;
  for (const auto& c : market.classes) hi = std::max(hi, c.demand.choke_price());
  const GridSpec grid = GridSpec::with_resolution(0.0, hi, resolution, refinement_passes);
  const Allocation base_alloc = allocate(market, prices);
  const auto base = revenues(market, prices, base_alloc);
  bool first = true;
  auto consider = [&](std::size_t i, PriceKind kind) {
    const auto& id = market.providers[i].id;
    const GridOptimum opt =
        grid_best_response(market, market.unlicensed.capacity, prices, grid, id, kind);
    const double gain = opt.revenue - base.at(id);
    if (kind == PriceKind::Unlicensed) cert.max_unlicensed_gain = std::max(cert.max_unlicensed_gain, gain);
    if (first || gain > cert.max_gain) {
      first = false;
      cert.max_gain = gain;
      cert.worst_deviator = id;
      cert.kind = kind;
      cert.deviation_price = opt.price;
    }
  };
  for (std::size_t i = 0; i < market.providers.size(); ++i) {
    if (market.providers[i].is_incumbent()) consider(i, PriceKind::Licensed);
    if (market.unlicensed.present()) consider(i, PriceKind::Unlicensed);
  }
  return cert;
}

}  // namespace spectrum
