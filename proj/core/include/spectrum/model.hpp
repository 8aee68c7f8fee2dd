#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace spectrum {

/// Latency value reported for an unlicensed band of zero capacity. The band
/// does not exist, so no load can be placed on it at any delivered price.
inline constexpr double kBandAbsent = std::numeric_limits<double>::infinity();

/// Congestion cost l(x) = offset + slope * x^exponent.
///
/// exponent == 1 is the affine case used throughout the analytic solvers;
/// exponent > 1 gives the general convex family.
struct LatencySpec {
  double offset = 0.0;
  double slope = 1.0;
  double exponent = 1.0;

  double operator()(double load) const;
  double derivative(double load) const;
  /// Load at which the latency reaches `level`; 0 when level <= offset.
  double inverse(double level) const;
  /// Integral of the latency from 0 to `load`.
  double integral(double load) const;
  bool is_linear() const noexcept { return exponent == 1.0; }
};

/// Shared band whose latency slope scales as kappa / capacity.
struct UnlicensedBand {
  double capacity = 0.0;
  /// `slope` holds kappa, the per-unit-capacity congestion coefficient.
  LatencySpec latency{};

  bool present() const noexcept { return capacity > 0.0; }
  /// Latency with the capacity folded into the slope. Requires present().
  LatencySpec effective() const;
};

struct BoxDemand {
  double valuation = 1.0;  // W
  double mass = 1.0;       // Q
};

struct LinearDemand {
  double intercept = 1.0;   // A
  double elasticity = 1.0;  // beta
};

/// Inverse demand P(q). Only the inverse curve is stored.
struct DemandSpec {
  std::variant<BoxDemand, LinearDemand> kind = BoxDemand{};

  double inverse(double q) const;
  /// Integral of P from 0 to q (closed form).
  double integral(double q) const;
  /// P(0), the highest delivered price any customer accepts.
  double choke_price() const;
  /// Largest mass that can ever be served (Q, or A / beta).
  double max_mass() const;
  bool is_box() const noexcept { return std::holds_alternative<BoxDemand>(kind); }
  const BoxDemand& box() const { return std::get<BoxDemand>(kind); }
  const LinearDemand& linear() const { return std::get<LinearDemand>(kind); }
};

struct CustomerClass {
  double weight = 1.0;  // lambda_t, weight on congestion in the delivered price
  DemandSpec demand;
};

struct ServiceProvider {
  std::string id;
  /// Licensed band latency; empty for entrants.
  std::optional<LatencySpec> licensed;

  bool is_incumbent() const noexcept { return licensed.has_value(); }

  static ServiceProvider incumbent(std::string id, LatencySpec latency);
  static ServiceProvider entrant(std::string id);
};

struct MarketConfig {
  std::vector<ServiceProvider> providers;
  UnlicensedBand unlicensed;
  /// One class, or two classes ordered high-weight first.
  std::vector<CustomerClass> classes;

  std::vector<std::size_t> incumbent_indices() const;
  std::size_t incumbent_count() const;
  /// Index of the provider with the given id. Throws Error(InvalidConfig).
  std::size_t index_of(std::string_view id) const;
  /// Index of the first incumbent. Throws Error(InvalidConfig) if none.
  std::size_t first_incumbent() const;
  MarketConfig with_capacity(double capacity) const;
  /// True when every latency in the market is affine.
  bool all_linear() const;
};

double licensed_latency(const ServiceProvider& sp, double load);
double unlicensed_latency(const UnlicensedBand& band, double load);
double inverse_demand(const CustomerClass& cls, double q);

struct Issue {
  std::string path;
  std::string message;
};

struct ValidationReport {
  std::vector<Issue> errors;
  std::vector<Issue> warnings;
  std::vector<Issue> notes;

  bool ok() const noexcept { return errors.empty(); }
};

/// Structural problems are errors; violated regime assumptions are warnings.
ValidationReport validate_market(const MarketConfig& config);

}  // namespace spectrum
