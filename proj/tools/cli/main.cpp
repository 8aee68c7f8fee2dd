#include <iostream>

#include "CLI11.hpp"
#include "command.hpp"

using spectrum::cli::Command;
using spectrum::cli::Format;
using spectrum::cli::Verb;

namespace {

void add_solver_flags(CLI::App* app, Command& c) {
  app->add_option("--damping", c.damping, "Best-response damping factor")->capture_default_str();
  app->add_option("--max-iterations", c.max_iterations, "Iteration cap for iterative solvers")->capture_default_str();
  app->add_option("--price-tol", c.price_tol, "Convergence threshold on successive prices")->capture_default_str();
}

void add_config(CLI::App* app, Command& c) {
  app->add_option("config", c.config_path, "Market configuration (JSON)")->required();
  app->add_option("-o,--output", c.output_path, "Output file (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Price-competition equilibria in spectrum markets with an unlicensed band"};
  app.require_subcommand(1);
  Command c;
  std::string format;
  const std::map<std::string, Format> formats{{"json", Format::Json}, {"csv", Format::Csv}};

  auto* solve = app.add_subcommand("solve", "Solve the equilibrium of a market");
  add_config(solve, c);
  solve->add_option("-C,--capacity", c.capacity, "Override the unlicensed capacity");
  solve->add_option("-f,--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  add_solver_flags(solve, c);

  auto* sweep = app.add_subcommand("sweep", "Sweep the unlicensed capacity");
  add_config(sweep, c);
  sweep->add_option("-f,--format", format, "csv (plus breakpoint sidecar) or json")
      ->check(CLI::IsMember({"json", "csv"}));
  sweep->add_option("--breakpoints", c.breakpoints_path, "Breakpoint JSON sidecar path");
  sweep->add_option("--grid-lo", c.grid_lo, "Lowest capacity")->capture_default_str();
  sweep->add_option("--grid-hi", c.grid_hi, "Highest capacity")->capture_default_str();
  sweep->add_option("--grid-points", c.grid_points, "Number of capacities")->capture_default_str();
  bool linear = false;
  sweep->add_flag("--linear", linear, "Evenly spaced grid on [lo, hi] instead of C=0 plus a log grid");
  sweep->add_flag("--divided", c.divided, "Split the capacity among incumbents as licensed bandwidth");
  sweep->add_option("--jump-tol", c.jump_tol, "Price-jump threshold")->capture_default_str();
  sweep->add_option("--slope-tol", c.slope_tol, "Welfare slope below which a segment is flat")->capture_default_str();
  sweep->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();
  add_solver_flags(sweep, c);

  auto* reproduce = app.add_subcommand("reproduce", "Recompute a built-in scenario and compare with expected values");
  reproduce->add_option("preset", c.preset, "unit-w1, unit-w2, duopoly or two-class")->required();
  reproduce->add_option("-o,--output", c.output_path, "Output file (default: stdout)");
  reproduce->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();

  auto* validate = app.add_subcommand("validate", "Check a market configuration");
  add_config(validate, c);

  auto* certify = app.add_subcommand("certify", "Solve, then search unilateral price deviations on a grid");
  add_config(certify, c);
  certify->add_option("-C,--capacity", c.capacity, "Override the unlicensed capacity");
  certify->add_option("--resolution", c.resolution, "Deviation grid resolution")->capture_default_str();
  certify->add_option("--gain-tol", c.gain_tol, "Largest tolerated deviation gain")->capture_default_str();
  add_solver_flags(certify, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : spectrum::cli::kExitValidation;
  }

  if (solve->parsed()) c.verb = Verb::Solve;
  if (sweep->parsed()) c.verb = Verb::Sweep;
  if (reproduce->parsed()) c.verb = Verb::Reproduce;
  if (validate->parsed()) c.verb = Verb::Validate;
  if (certify->parsed()) c.verb = Verb::Certify;
  if (!format.empty()) c.format = formats.at(format);
  c.grid_log = !linear;
  return spectrum::cli::run(c, std::cout, std::cerr);
}
