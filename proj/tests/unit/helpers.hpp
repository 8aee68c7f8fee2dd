#pragma once

#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "spectrum/model.hpp"
#include "spectrum/presets.hpp"
#include "spectrum/wardrop.hpp"

namespace testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(20261015);
  return engine;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }

inline void near(double actual, double expected, double tol) {
  INFO("actual=" << actual << " expected=" << expected << " tol=" << tol);
  CHECK(std::abs(actual - expected) <= tol);
}

/// One incumbent, one entrant, one box class with random affine or quadratic
/// latencies and a valuation that leaves part of the demand unserved by the monopolist.
inline spectrum::MarketConfig random_homogeneous(double capacity, double exponent_l = 1.0, double exponent_g = 1.0) {
  spectrum::MarketConfig m;
  const double Q = uniform(0.5, 2.0);
  const double b = uniform(0.5, 2.0);
  const double T1 = uniform(0.0, 0.3);
  const double W = T1 + uniform(0.1, 1.0) * b * Q;
  m.providers.push_back(spectrum::ServiceProvider::incumbent("incumbent", {T1, b, exponent_l}));
  m.providers.push_back(spectrum::ServiceProvider::entrant("entrant"));
  m.unlicensed = {capacity, {uniform(0.0, 0.3), uniform(0.5, 2.0), exponent_g}};
  m.classes.push_back({1.0, spectrum::DemandSpec{spectrum::BoxDemand{W, Q}}});
  return m;
}

}  // namespace testing

namespace testing {

/// Small random market: one or two incumbents (plus an entrant when there is
/// one incumbent), one or two classes, box or linear demand, affine latencies.
inline spectrum::MarketConfig random_small_market() {
  using namespace spectrum;
  MarketConfig m;
  const int incumbents = uniform_int(1, 2);
  for (int i = 0; i < incumbents; ++i) {
    m.providers.push_back(
        ServiceProvider::incumbent("inc" + std::to_string(i + 1), {uniform(0.0, 0.3), uniform(0.3, 2.0), 1.0}));
  }
  if (incumbents == 1) m.providers.push_back(ServiceProvider::entrant("ent"));
  m.unlicensed = {uniform_int(0, 4) == 0 ? 0.0 : uniform(0.1, 3.0), {uniform(0.0, 0.3), uniform(0.3, 2.0), 1.0}};
  const int classes = uniform_int(1, 2);
  const double wh = uniform(0.3, 1.0);
  for (int t = 0; t < classes; ++t) {
    const double weight = t == 0 ? wh : wh * uniform(0.1, 0.9);
    if (uniform_int(0, 1)) {
      m.classes.push_back({weight, DemandSpec{BoxDemand{uniform(0.3, 2.0), uniform(0.3, 1.5)}}});
    } else {
      m.classes.push_back({weight, DemandSpec{LinearDemand{uniform(0.5, 2.0), uniform(1.0, 4.0)}}});
    }
  }
  return m;
}

inline spectrum::PriceProfile random_prices(const spectrum::MarketConfig& m) {
  spectrum::PriceProfile p;
  for (const auto& sp : m.providers) {
    if (sp.is_incumbent()) p.licensed[sp.id] = uniform(0.0, 1.0);
    p.unlicensed[sp.id] = uniform_int(0, 1) ? 0.0 : uniform(0.0, 0.5);
  }
  return p;
}

}  // namespace testing
