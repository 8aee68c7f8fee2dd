#include "spectrum/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spectrum/error.hpp"

namespace spectrum {

namespace {

double choke(const MarketConfig& m) {
  double hi = 0.0;
  for (const auto& c : m.classes) hi = std::max(hi, c.demand.choke_price());
  return hi;
}

bool same_latency(const LatencySpec& a, const LatencySpec& b) {
  return a.offset == b.offset && a.slope == b.slope && a.exponent == b.exponent;
}

bool all_box(const MarketConfig& m) {
  return std::all_of(m.classes.begin(), m.classes.end(), [](const CustomerClass& c) { return c.demand.is_box(); });
}

bool symmetric_incumbents(const MarketConfig& m) {
  const auto inc = m.incumbent_indices();
  if (inc.size() < 2) return false;
  for (std::size_t i : inc) {
    if (!same_latency(*m.providers[i].licensed, *m.providers[inc.front()].licensed)) return false;
  }
  return true;
}

void warn_thin_market(const MarketConfig& m, EquilibriumResult& r) {
  if (m.unlicensed.present() && m.providers.size() < 2) {
    r.diagnostics.warnings.push_back("fewer than two providers; unlicensed price pinned at zero regardless");
  }
}

void finalize(const MarketConfig& m, const SolveOptions& options, EquilibriumResult& r) {
  warn_thin_market(m, r);
  if (r.regime == Regime::ServeLowOnly) {
    r.diagnostics.warnings.push_back("incumbent serves only the low class");
  }
  if (options.certify) {
    r.diagnostics.certificate = certify_equilibrium(m, r.prices, options.certify_resolution);
    r.diagnostics.deviation_margin = -r.diagnostics.certificate->max_gain;
  }
}

// Price used in the profile when the incumbent sells nothing at any price.
double posted_price(const MarketConfig& m, double price) { return std::isfinite(price) ? price : choke(m); }

EquilibriumResult from_best_response(const MarketConfig& m, const BestResponse& br, const SolveOptions& options) {
  EquilibriumResult r = evaluate_profile(m, uniform_profile(m, posted_price(m, br.price)));
  r.regime = br.regime;
  r.tie = br.tie;
  r.diagnostics.method = to_string(br.method);
  r.diagnostics.iterations = 1;
  finalize(m, options, r);
  return r;
}

std::string trace_text(const std::vector<double>& trace) {
  std::ostringstream os;
  os.precision(12);
  const std::size_t from = trace.size() > 8 ? trace.size() - 8 : 0;
  os << "last prices:";
  for (std::size_t k = from; k < trace.size(); ++k) os << ' ' << trace[k];
  return os.str();
}

void check_options(const SolveOptions& o) {
  if (!(o.damping > 0.0 && o.damping <= 1.0)) throw Error(ErrorKind::InvalidConfig, "damping must lie in (0, 1]");
  if (o.max_iterations < 1) throw Error(ErrorKind::InvalidConfig, "max_iterations must be positive");
  if (!(o.price_tolerance > 0.0)) throw Error(ErrorKind::InvalidConfig, "price tolerance must be positive");
}

}  // namespace

EquilibriumResult evaluate_profile(const MarketConfig& market, const PriceProfile& prices) {
  EquilibriumResult r;
  r.capacity = market.unlicensed.capacity;
  r.prices = prices;
  r.allocation = allocate(market, prices);
  r.delivered = delivered_prices(market, prices, r.allocation);
  r.report = welfare_report(market, prices, r.allocation, r.delivered);
  r.diagnostics.wardrop_residual = wardrop_residual(market, prices, r.allocation);
  const std::size_t focal = market.first_incumbent();
  r.regime = classify_regime(market, prices, r.allocation, focal);
  return r;
}

EquilibriumResult solve_homogeneous_single(const MarketConfig& market, const SolveOptions& options) {
  try {
    return from_best_response(market, best_response_homogeneous(market, market.unlicensed.capacity), options);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::UseGenericPath && e.kind() != ErrorKind::RegimeViolation) throw;
    EquilibriumResult r = solve_generic(market, options);
    r.diagnostics.warnings.insert(r.diagnostics.warnings.begin(),
                                  std::string("closed form not applicable (") + e.what() + "); used generic solver");
    return r;
  }
}

EquilibriumResult solve_heterogeneous_single(const MarketConfig& market, const SolveOptions& options) {
  return from_best_response(market, best_response_heterogeneous(market, market.unlicensed.capacity), options);
}

EquilibriumResult solve_symmetric_N(const MarketConfig& market, const SolveOptions& options) {
  check_options(options);
  if (!symmetric_incumbents(market) || market.classes.size() != 1) {
    throw Error(ErrorKind::InvalidConfig, "symmetric solver needs >= 2 identical incumbents and one class");
  }
  const double C = market.unlicensed.capacity;
  const std::string focal = market.providers[market.first_incumbent()].id;
  double p = options.initial_price.value_or(0.5 * choke(market));
  std::vector<double> trace{p};
  for (int it = 1; it <= options.max_iterations; ++it) {
    const BestResponse br = best_response_generic(market, C, uniform_profile(market, p), focal, options.search);
    const double target = posted_price(market, br.price);
    const double next = (1.0 - options.damping) * p + options.damping * target;
    trace.push_back(next);
    if (std::abs(next - p) < options.price_tolerance) {
      EquilibriumResult r = evaluate_profile(market, uniform_profile(market, next));
      r.diagnostics.method = "symmetric_iteration";
      r.diagnostics.iterations = it;
      r.diagnostics.trace = std::move(trace);
      if (!br.precondition_ok) r.diagnostics.warnings.push_back("best-response precondition failed; grid search used");
      finalize(market, options, r);
      return r;
    }
    p = next;
  }
  throw Error(ErrorKind::NonConvergence, "symmetric best-response iteration did not converge in " +
                                             std::to_string(options.max_iterations) + " iterations; " +
                                             trace_text(trace));
}

EquilibriumResult solve_generic(const MarketConfig& market, const SolveOptions& options) {
  check_options(options);
  const double C = market.unlicensed.capacity;
  const auto inc = market.incumbent_indices();
  if (inc.empty()) throw Error(ErrorKind::InvalidConfig, "market has no incumbent");
  PriceProfile prices = uniform_profile(market, options.initial_price.value_or(0.5 * choke(market)));
  std::vector<double> trace;
  bool precondition_ok = true;
  for (int it = 1; it <= options.max_iterations; ++it) {
    double change = 0.0;
    for (std::size_t i : inc) {
      const auto& id = market.providers[i].id;
      const BestResponse br = best_response_generic(market, C, prices, id, options.search);
      precondition_ok = precondition_ok && br.precondition_ok;
      const double old = prices.licensed.at(id);
      // A lone incumbent faces fixed rivals, so its best response is final.
      const double damping = inc.size() == 1 ? 1.0 : options.damping;
      const double next = (1.0 - damping) * old + damping * posted_price(market, br.price);
      change = std::max(change, std::abs(next - old));
      prices.licensed[id] = next;
    }
    trace.push_back(prices.licensed.at(market.providers[inc.front()].id));
    if (change < options.price_tolerance || inc.size() == 1) {
      EquilibriumResult r = evaluate_profile(market, prices);
      r.diagnostics.method = "best_response_iteration";
      r.diagnostics.iterations = it;
      r.diagnostics.trace = std::move(trace);
      if (!precondition_ok) r.diagnostics.warnings.push_back("best-response precondition failed; grid search used");
      finalize(market, options, r);
      return r;
    }
  }
  throw Error(ErrorKind::NonConvergence, "best-response iteration did not converge in " +
                                             std::to_string(options.max_iterations) + " iterations; " +
                                             trace_text(trace));
}

EquilibriumResult solve(const MarketConfig& market, const SolveOptions& options) {
  const std::size_t n_inc = market.incumbent_count();
  if (n_inc == 0) throw Error(ErrorKind::InvalidConfig, "market has no incumbent");
  if (n_inc == 1 && market.all_linear() && all_box(market)) {
    if (market.classes.size() == 1) return solve_homogeneous_single(market, options);
    if (market.classes.size() == 2) return solve_heterogeneous_single(market, options);
  }
  if (market.classes.size() == 1 && symmetric_incumbents(market)) return solve_symmetric_N(market, options);
  return solve_generic(market, options);
}

DeviationReport verify_equilibrium(const MarketConfig& market, const EquilibriumResult& result,
                                   double grid_resolution) {
  DeviationReport rep;
  const Certificate cert = certify_equilibrium(market, result.prices, grid_resolution);
  rep.max_gain = cert.max_gain;
  rep.deviator = cert.worst_deviator;
  rep.kind = cert.kind;
  rep.deviation_price = cert.deviation_price;
  rep.max_unlicensed_gain = cert.max_unlicensed_gain;
  for (const auto& [id, p] : result.prices.unlicensed) {
    if (p != 0.0) rep.unlicensed_prices_zero = false;
  }
  if (market.unlicensed.present() && result.allocation.unlicensed_total() <= 1e-12) {
    const double g0 = market.unlicensed.latency.offset;
    bool ok = true;
    for (std::size_t t = 0; t < market.classes.size(); ++t) {
      const auto& cls = market.classes[t];
      const double level = cls.demand.inverse(result.allocation.served(t));
      if (cls.weight * g0 < level - 1e-9 * std::max(1.0, level)) ok = false;
    }
    rep.no_service_condition = ok;
  }
  rep.unlicensed_pricing_consistent = rep.unlicensed_prices_zero || rep.no_service_condition.value_or(false) ||
                                      !market.unlicensed.present();
  return rep;
}

}  // namespace spectrum
