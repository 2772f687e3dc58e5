#pragma once

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srp/cli/commands.hpp"
#include "srp/cli/selftest.hpp"
#include "srp/errors.hpp"
#include "srp/io/table.hpp"

namespace srp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline CommandResult dispatch(const RunSpec& spec) {
  if (spec.command == "eigen") return cmd_eigen(spec);
  if (spec.command == "qsd") return cmd_qsd(spec);
  if (spec.command == "calibrate") return cmd_calibrate(spec);
  if (spec.command == "risk-table") return cmd_risk_table(spec);
  if (spec.command == "figures") return cmd_figures(spec);
  if (spec.command == "simulate") return cmd_simulate(spec);
  if (spec.command == "selftest") return cmd_selftest(spec);
  throw DomainError("unknown command '" + spec.command + "'");
}

/// Parses argv into a RunSpec, runs the command and writes its table.
/// Returns 0 on success, 1 on a computation failure, 2 on bad arguments.
inline int run(int argc, const char* const* argv) {
  RunSpec spec;
  std::string format = "csv";
  bool quiet = false;

  CLI::App app{"SRP change-point detection: eigenvalues, quasi-stationary law, "
               "minimax risk tables and Monte Carlo checks"};
  app.add_option("command", spec.command, "eigen | qsd | calibrate | risk-table | figures | simulate | selftest")
      ->required()
      ->check(CLI::IsMember(command_names()));
  app.add_option("--mu", spec.mu, "post-change drift; repeat or comma-separate for several")
      ->delimiter(',');
  app.add_option("--T", spec.T, "ARL level (single row)");
  app.add_option("--A", spec.A, "detection threshold");
  app.add_option("--t-from", spec.t_from, "first T of the grid")->capture_default_str();
  app.add_option("--t-to", spec.t_to, "last T of the grid")->capture_default_str();
  app.add_option("--t-step", spec.t_step, "T increment")->capture_default_str();
  app.add_option("--tol-rel", spec.tol_rel, "relative quadrature tolerance")->capture_default_str();
  app.add_option("--paths", spec.paths, "Monte Carlo paths (default 10000, selftest 1000)");
  app.add_option("--step", spec.step, "simulation time step")->capture_default_str();
  app.add_option("--seed", spec.seed, "RNG seed")->capture_default_str();
  app.add_option("--x", spec.x, "fixed headstart for simulate");
  app.add_flag("--quasi-stationary", spec.quasi_stationary, "draw the headstart from Q_A");
  app.add_option("--theta", spec.theta, "change-point for simulate (default: never)");
  app.add_option("--points", spec.points, "grid size for qsd")->capture_default_str();
  app.add_option("--fault", spec.fault, "selftest: relative error injected into W_{1,xi/2}");
  app.add_option("--out", spec.out, "output file (default stdout)");
  app.add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_flag("--quiet", quiet, "no progress messages");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  spec.format = (format == "json") ? io::Format::json : io::Format::csv;
  spec.progress = !quiet;

  try {
    spec.validate();
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const CommandResult res = dispatch(spec);
    io::write_table(spec.out, res.table, spec.format);
    if (res.exit_code != 0) std::cerr << spec.command << ": some rows or checks failed\n";
    return res.exit_code;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace srp::cli
