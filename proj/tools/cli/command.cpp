#include "command.hpp"

#include <fstream>
#include <ostream>

#include "spectrum/error.hpp"
#include "spectrum/io.hpp"
#include "spectrum/sweep.hpp"

namespace spectrum::cli {

namespace {

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidConfig, "cannot write '" + path + "'");
  f << text;
}

std::string sidecar_path(const Command& c) {
  if (!c.breakpoints_path.empty() || c.output_path.empty()) return c.breakpoints_path;
  std::string stem = c.output_path;
  if (auto dot = stem.rfind('.'); dot != std::string::npos && stem.find('/', dot) == std::string::npos) {
    stem.erase(dot);
  }
  return stem + ".breakpoints.json";
}

SolveOptions solve_options(const Command& c) {
  SolveOptions o;
  o.damping = c.damping;
  o.max_iterations = c.max_iterations;
  o.price_tolerance = c.price_tol;
  return o;
}

// Loads and validates the config; returns nullopt (after reporting) on errors.
std::optional<MarketConfig> load_checked(const Command& c, std::ostream& err) {
  if (c.config_path.empty()) throw Error(ErrorKind::InvalidConfig, "a config file is required");
  MarketConfig m = load_market(c.config_path);
  if (c.capacity) m = m.with_capacity(*c.capacity);
  const ValidationReport rep = validate_market(m);
  for (const auto& w : rep.warnings) err << "warning: " << w.path << ": " << w.message << "\n";
  if (!rep.ok()) {
    for (const auto& e : rep.errors) err << "error: " << e.path << ": " << e.message << "\n";
    return std::nullopt;
  }
  return m;
}

int do_solve(const Command& c, std::ostream& out, std::ostream& err) {
  auto m = load_checked(c, err);
  if (!m) return kExitValidation;
  const EquilibriumResult r = solve(*m, solve_options(c));
  for (const auto& w : r.diagnostics.warnings) err << "warning: " << w << "\n";
  if (c.format.value_or(Format::Json) == Format::Csv) {
    SweepResult one;
    one.samples.push_back({r.capacity, r, {}});
    emit(c.output_path, sweep_to_csv(*m, one), out);
  } else {
    emit(c.output_path, result_to_json(*m, r), out);
  }
  return kExitOk;
}

int do_sweep(const Command& c, std::ostream& out, std::ostream& err) {
  auto m = load_checked(c, err);
  if (!m) return kExitValidation;
  std::vector<double> grid;
  if (c.grid_log) {
    grid = default_capacity_grid(c.grid_points, c.grid_lo, c.grid_hi);
  } else {
    grid = linear_capacity_grid(c.grid_lo, c.grid_hi, c.grid_points);
  }
  SweepOptions o;
  o.jump_tol = c.jump_tol;
  o.slope_tol = c.slope_tol;
  o.threads = c.threads;
  o.solve = solve_options(c);
  const SweepResult s = c.divided
                            ? divided_capacity_sweep(*m, grid, static_cast<int>(m->incumbent_count()), o)
                            : sweep_capacity(*m, grid, o);
  std::size_t failed = 0;
  for (const auto& sample : s.samples) failed += sample.result ? 0 : 1;
  if (failed) err << "warning: " << failed << " of " << s.samples.size() << " samples failed\n";
  if (c.format.value_or(Format::Csv) == Format::Json) {
    emit(c.output_path, sweep_to_json(*m, s), out);
  } else {
    emit(c.output_path, sweep_to_csv(*m, s), out);
    if (const std::string side = sidecar_path(c); !side.empty()) emit(side, breakpoints_to_json(s), out);
  }
  return failed == s.samples.size() ? kExitSolver : kExitOk;
}

int do_validate(const Command& c, std::ostream& out) {
  if (c.config_path.empty()) throw Error(ErrorKind::InvalidConfig, "a config file is required");
  const ValidationReport rep = validate_market(load_market(c.config_path));
  emit(c.output_path, validation_to_json(rep), out);
  return rep.ok() ? kExitOk : kExitValidation;
}

int do_certify(const Command& c, std::ostream& out, std::ostream& err) {
  auto m = load_checked(c, err);
  if (!m) return kExitValidation;
  const EquilibriumResult r = solve(*m, solve_options(c));
  const DeviationReport d = verify_equilibrium(*m, r, c.resolution);
  const std::string text = "{\n\"equilibrium\": " + result_to_json(*m, r) + ",\n\"deviation\": " +
                           deviation_to_json(d) + "}\n";
  emit(c.output_path, text, out);
  const bool ok = d.max_gain <= c.gain_tol && d.unlicensed_pricing_consistent;
  if (!ok) err << "certificate failed: gain " << format_number(d.max_gain) << " by " << d.deviator << "\n";
  return ok ? kExitOk : kExitValidation;
}

}  // namespace

int run(const Command& command, std::ostream& out, std::ostream& err) {
  try {
    switch (command.verb) {
      case Verb::Solve: return do_solve(command, out, err);
      case Verb::Sweep: return do_sweep(command, out, err);
      case Verb::Reproduce: return reproduce(command, out, err);
      case Verb::Validate: return do_validate(command, out);
      case Verb::Certify: return do_certify(command, out, err);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Parse:
      case ErrorKind::InvalidConfig:
      case ErrorKind::NoLicensedBand: return kExitValidation;
      default: return kExitSolver;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitSolver;
}

}  // namespace spectrum::cli
