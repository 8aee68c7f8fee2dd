#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace spectrum::cli {

enum class Verb { Solve, Sweep, Reproduce, Validate, Certify };
enum class Format { Json, Csv };

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitSolver = 2;

struct Command {
  Verb verb = Verb::Solve;
  std::string config_path;
  /// Empty writes to the output stream.
  std::string output_path;
  /// Sweep sidecar; defaults to <output stem>.breakpoints.json when an output path is set.
  std::string breakpoints_path;
  std::optional<Format> format;
  std::string preset;

  /// Overrides the config's unlicensed capacity (solve, certify).
  std::optional<double> capacity;

  // Sweep grid: C = 0 plus `grid_points` capacities on [grid_lo, grid_hi].
  double grid_lo = 1e-3;
  double grid_hi = 10.0;
  int grid_points = 400;
  bool grid_log = true;
  /// Sweep the divided-capacity counterfactual instead.
  bool divided = false;

  double jump_tol = 1e-2;
  double slope_tol = 1e-6;
  double resolution = 1e-3;
  double gain_tol = 1e-6;
  double damping = 0.5;
  int max_iterations = 10000;
  double price_tol = 1e-8;
  unsigned threads = 0;
};

const std::vector<std::string>& preset_names();

/// Executes the command; returns 0 on success, 1 on validation or comparison
/// failure, 2 on solver error.
int run(const Command& command, std::ostream& out, std::ostream& err);

/// `reproduce` verb body.
int reproduce(const Command& command, std::ostream& out, std::ostream& err);

}  // namespace spectrum::cli
