#pragma once

#include "spectrum/model.hpp"

namespace spectrum {

/// Parameters of a single-incumbent market with one box-demand class and
/// affine latencies l(x) = licensed_offset + licensed_slope * x and
/// g(x) = unlicensed_offset + (kappa / C) * x.
struct HomogeneousBoxParams {
  double valuation = 1.0;
  double mass = 1.0;
  double weight = 1.0;
  double licensed_offset = 0.0;
  double licensed_slope = 1.0;
  double unlicensed_offset = 0.0;
  double kappa = 1.0;
  int entrants = 1;
};

MarketConfig homogeneous_box_market(const HomogeneousBoxParams& params, double capacity);

/// Two box-demand classes (high weight first) served by one incumbent with
/// l(x) = x and an unlicensed band g(x) = x / C. Defaults are the
/// W_h=1.6, Q_h=1, W_l=0.85, Q_l=1.3, lambda_h=0.4, lambda_l=0.1 example.
struct TwoClassBoxParams {
  double high_valuation = 1.6;
  double high_mass = 1.0;
  double high_weight = 0.4;
  double low_valuation = 0.85;
  double low_mass = 1.3;
  double low_weight = 0.1;
  double licensed_slope = 1.0;
  double kappa = 1.0;
  int entrants = 1;
};

MarketConfig two_class_box_market(const TwoClassBoxParams& params, double capacity);

/// N identical incumbents with l(x) = x, linear inverse demand P(q) = 1 - beta q
/// and unlicensed latency g(x) = x / C.
MarketConfig symmetric_linear_market(int incumbents, double beta, double capacity, int entrants = 1);

/// Counterfactual where capacity C is split evenly among the incumbents as
/// licensed bandwidth: each licensed slope becomes slope / (1 + C / N) and the
/// unlicensed band is removed.
MarketConfig divide_capacity_among_incumbents(const MarketConfig& market, double capacity);

}  // namespace spectrum
