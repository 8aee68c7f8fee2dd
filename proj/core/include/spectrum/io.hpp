#pragma once

#include <string>
#include <string_view>

#include "spectrum/equilibrium.hpp"
#include "spectrum/model.hpp"
#include "spectrum/sweep.hpp"

namespace spectrum {

/// Parses a market document with top-level keys `providers`, `unlicensed`,
/// `classes`. Throws Error(Parse) naming the offending JSON path.
MarketConfig parse_market(std::string_view json_text);
MarketConfig load_market(const std::string& path);
std::string market_to_json(const MarketConfig& market);

/// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite values.
std::string format_number(double value);

std::string result_to_json(const MarketConfig& market, const EquilibriumResult& result);
std::string validation_to_json(const ValidationReport& report);
std::string deviation_to_json(const DeviationReport& report);
std::string certificate_to_json(const Certificate& certificate);

/// One row per sample: C, price_<incumbent>..., p_w, x_licensed_h,
/// x_licensed_l, X_w_h, X_w_l, delivered_h, delivered_l, SW, CS,
/// revenue_<provider>..., regime. Low-class columns are empty for one-class
/// markets; failed samples carry only C and regime "error".
std::string sweep_to_csv(const MarketConfig& market, const SweepResult& sweep);
/// Every sample as a result object, followed by the breakpoint summary.
std::string sweep_to_json(const MarketConfig& market, const SweepResult& sweep);
/// Breakpoints, closed-form thresholds and per-sample errors.
std::string breakpoints_to_json(const SweepResult& sweep);

}  // namespace spectrum
