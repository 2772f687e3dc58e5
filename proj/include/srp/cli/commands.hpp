#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "srp/errors.hpp"
#include "srp/io/table.hpp"
#include "srp/mc/parallel.hpp"
#include "srp/mc/simulate.hpp"
#include "srp/qsd.hpp"
#include "srp/risk.hpp"

namespace srp::cli {

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"eigen",   "qsd",      "calibrate", "risk-table",
                                                 "figures", "simulate", "selftest"};
  return names;
}

/// Everything a command needs; echoed into the output header.
struct RunSpec {
  std::string command;
  std::vector<double> mu;  // empty: command default
  std::optional<double> T;
  std::optional<double> A;
  double t_from = 1.0, t_to = 100.0, t_step = 1.0;
  double tol_rel = 1e-9;
  std::optional<std::uint64_t> paths;
  double step = 1e-3;
  std::uint64_t seed = 1;
  std::optional<double> x;        // fixed headstart
  bool quasi_stationary = false;  // draw the headstart from Q_A
  double theta = std::numeric_limits<double>::infinity();
  int points = 200;
  double fault = 0.0;
  std::string out;  // empty or "-": stdout
  io::Format format = io::Format::csv;
  bool progress = true;

  std::vector<double> mu_values() const {
    if (!mu.empty()) return mu;
    if (command == "figures") return {0.5, 1.0};
    return {1.0};
  }

  std::uint64_t path_count() const { return paths.value_or(command == "selftest" ? 1000 : 10000); }

  std::vector<double> t_values() const {
    if (T) return {*T};
    std::vector<double> ts;
    const double slack = 1e-9 * std::fabs(t_to);
    for (std::int64_t i = 0;; ++i) {
      const double t = t_from + static_cast<double>(i) * t_step;
      if (t > t_to + slack) break;
      ts.push_back(t);
    }
    return ts;
  }

  numerics::Tolerance tolerance() const {
    numerics::Tolerance t = default_risk_tolerance();
    t.rel = tol_rel;
    return t;
  }

  void validate() const {
    std::ostringstream os;
    bool known = false;
    for (const auto& c : command_names()) known = known || c == command;
    if (!known) os << "unknown command '" << command << "'; ";
    for (double m : mu)
      if (!(m != 0.0) || !std::isfinite(m)) os << "mu must be finite and nonzero; ";
    if (T && !(*T > 0.0 && std::isfinite(*T))) os << "T must be positive; ";
    if (A && !(*A > 0.0 && std::isfinite(*A))) os << "A must be positive; ";
    if (!(t_from > 0.0) || !(t_step > 0.0) || !(t_to >= t_from) || !std::isfinite(t_to))
      os << "grid needs 0 < t-from <= t-to and t-step > 0; ";
    if (!(tol_rel >= 1e-14 && tol_rel < 1.0)) os << "tol-rel must lie in [1e-14, 1); ";
    if (paths && *paths < 100) os << "paths must be >= 100; ";
    if (!(step > 0.0 && std::isfinite(step))) os << "step must be positive; ";
    if (!(theta >= 0.0)) os << "theta must be >= 0; ";
    if (points < 2) os << "points must be >= 2; ";
    if (x && quasi_stationary) os << "give either --x or --quasi-stationary, not both; ";
    if ((command == "eigen" || command == "qsd" || command == "simulate") && !A)
      os << command << " needs --A; ";
    if (!os.str().empty()) throw DomainError(os.str());
  }

  std::vector<std::pair<std::string, std::string>> echo() const {
    auto real = [](double v) { return io::format_real(v); };
    std::vector<std::pair<std::string, std::string>> h;
    h.emplace_back("command", command);
    std::string mus;
    for (double m : mu_values()) mus += (mus.empty() ? "" : ";") + real(m);
    h.emplace_back("mu", mus);
    if (command == "calibrate" || command == "risk-table" || command == "figures") {
      if (T) {
        h.emplace_back("T", real(*T));
      } else {
        h.emplace_back("t_from", real(t_from));
        h.emplace_back("t_to", real(t_to));
        h.emplace_back("t_step", real(t_step));
      }
    }
    if (A) h.emplace_back("A", real(*A));
    if (command == "risk-table" || command == "figures" || command == "selftest")
      h.emplace_back("tol_rel", io::format_real(tol_rel));
    if (command == "qsd") h.emplace_back("points", std::to_string(points));
    if (command == "simulate" || command == "selftest") {
      h.emplace_back("paths", std::to_string(path_count()));
      h.emplace_back("step", real(step));
      h.emplace_back("seed", std::to_string(seed));
    }
    if (command == "simulate") {
      h.emplace_back("headstart", quasi_stationary ? "quasi-stationary" : real(x.value_or(0.0)));
      h.emplace_back("theta", real(theta));
    }
    if (command == "selftest") h.emplace_back("fault", real(fault));
    h.emplace_back("format", format == io::Format::csv ? "csv" : "json");
    return h;
  }
};

struct CommandResult {
  io::Table table;
  int exit_code = 0;  // 0 ok, 1 some computation failed
};

namespace detail {

class Progress {
public:
  Progress(std::string what, std::size_t total, bool enabled)
      : what_(std::move(what)), total_(total), enabled_(enabled && total >= 20) {}
  void tick() {
    const std::size_t done = ++done_;
    if (!enabled_) return;
    if (done % std::max<std::size_t>(1, total_ / 10) == 0 || done == total_) {
      std::lock_guard<std::mutex> lock(mu_);
      std::clog << what_ << ": " << done << "/" << total_ << " rows\n";
    }
  }

private:
  std::string what_;
  std::size_t total_;
  bool enabled_;
  std::atomic<std::size_t> done_{0};
  std::mutex mu_;
};

inline std::string one_line(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (c == '\n' || c == ',') c = ';';
  return out;
}

}  // namespace detail

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// mu,T,A_T,lambda,B,C,gap,gap_bound,error over mu x T. Rows are computed
/// concurrently and emitted in (mu, T) order; a failing row keeps its
/// message in `error` and the run continues.
inline CommandResult cmd_risk_table(const RunSpec& spec) {
  spec.validate();
  CommandResult res;
  res.table.header = spec.echo();
  res.table.columns = {"mu", "T", "A_T", "lambda", "B", "C", "gap", "gap_bound", "error"};
  std::vector<std::pair<double, double>> jobs;
  for (double mu : spec.mu_values())
    for (double T : spec.t_values()) jobs.emplace_back(mu, T);

  std::vector<std::vector<io::Cell>> rows(jobs.size());
  detail::Progress progress(spec.command, jobs.size(), spec.progress);
  const auto tol = spec.tolerance();
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto [mu, T] = jobs[i];
    std::string error;
    RiskReport r;
    r.T = T;
    r.A_T = r.lambda = r.B = r.C = r.gap = kNaN;
    r.gap_bound = gap_bound(Model{mu}, T);
    try {
      r = compute_risk_report(Model{mu}, T, tol);
      error = check_risk_report(r);
    } catch (const std::exception& e) {
      error = e.what();
    }
    rows[i] = {mu, T, r.A_T, r.lambda, r.B, r.C, r.gap, r.gap_bound, detail::one_line(error)};
    progress.tick();
  });
  for (auto& row : rows) {
    if (!std::get<std::string>(row.back()).empty()) res.exit_code = 1;
    res.table.add_row(std::move(row));
  }
  return res;
}

inline CommandResult cmd_figures(const RunSpec& spec) { return cmd_risk_table(spec); }

/// mu,A,lambda,xi2,bracket_lo,bracket_hi,residual,qsd_mean,qsd_var
inline CommandResult cmd_eigen(const RunSpec& spec) {
  spec.validate();
  CommandResult res;
  res.table.header = spec.echo();
  res.table.columns = {"mu",       "A",        "lambda",   "xi2",    "bracket_lo",
                       "bracket_hi", "residual", "qsd_mean", "qsd_var"};
  for (double mu : spec.mu_values()) {
    const Model m{mu};
    const EigenPair e = solve_lambda(m, *spec.A);
    const auto br = eigenvalue_bracket(m, e.A);
    res.table.add_row({mu, e.A, e.lambda, e.xi2, br.lo, br.hi,
                       eigen_residual(m, e.A, e.lambda), qsd_mean(e), qsd_var(e)});
  }
  return res;
}

/// x,pdf,cdf on points + 1 equispaced levels of [0, A]; first mu only.
inline CommandResult cmd_qsd(const RunSpec& spec) {
  spec.validate();
  CommandResult res;
  const Model m{spec.mu_values().front()};
  const EigenPair e = solve_lambda(m, *spec.A);
  const QsdEval q(e);
  res.table.header = spec.echo();
  res.table.header.emplace_back("lambda", io::format_real(e.lambda));
  res.table.columns = {"x", "pdf", "cdf"};
  for (int i = 0; i <= spec.points; ++i) {
    const double x = e.A * i / spec.points;
    res.table.add_row({x, qsd_pdf(q, x), qsd_cdf(q, x)});
  }
  return res;
}

/// mu,T,A_T,lambda,xi2,sign_changes
inline CommandResult cmd_calibrate(const RunSpec& spec) {
  spec.validate();
  CommandResult res;
  res.table.header = spec.echo();
  res.table.columns = {"mu", "T", "A_T", "lambda", "xi2", "sign_changes"};
  for (double mu : spec.mu_values())
    for (double T : spec.t_values()) {
      const auto c = calibrate_threshold_detailed(Model{mu}, T, default_calibration_tolerance(T));
      res.table.add_row({mu, T, c.eigen.A, c.eigen.lambda, c.eigen.xi2,
                         static_cast<std::int64_t>(c.sign_changes)});
    }
  return res;
}

inline mc::SimConfig sim_config(const RunSpec& spec, double mu) {
  mc::SimConfig cfg;
  cfg.model = Model{mu};
  cfg.A = spec.A.value_or(5.0);
  cfg.headstart = spec.quasi_stationary ? mc::Headstart::stationary()
                                        : mc::Headstart::fixed(spec.x.value_or(0.0));
  cfg.theta = spec.theta;
  cfg.step = spec.step;
  cfg.n_paths = spec.path_count();
  cfg.seed = spec.seed;
  return cfg;
}

/// Analytic counterpart of a simulated mean, or nan when there is none.
inline double analytic_mean(const mc::SimConfig& cfg) {
  const bool never = !std::isfinite(cfg.theta);
  if (cfg.headstart.quasi_stationary) {
    const EigenPair e = solve_lambda(cfg.model, cfg.A);
    return never ? 1.0 / e.lambda : srp_delay(e);
  }
  if (never) return arl_gsr(cfg.A, cfg.headstart.x);
  if (cfg.theta == 0.0) return add0_gsr(cfg.model, cfg.A, cfg.headstart.x);
  return kNaN;
}

/// mu,A,headstart,theta,step,n_paths,seed,t_max,mean,std_err,n_effective,censored,analytic
inline CommandResult cmd_simulate(const RunSpec& spec) {
  spec.validate();
  CommandResult res;
  res.table.header = spec.echo();
  res.table.columns = {"mu",   "A",     "headstart", "theta",   "step",        "n_paths",  "seed",
                       "t_max", "mean", "std_err",   "n_effective", "censored", "analytic"};
  for (double mu : spec.mu_values()) {
    const auto cfg = sim_config(spec, mu);
    mc::SimEstimate est;
    if (cfg.headstart.quasi_stationary) {
      auto srp = mc::simulate_srp(cfg, {cfg.theta});
      est = srp.estimates.front();
    } else {
      est = mc::simulate_gsr_passage(cfg);
    }
    res.table.add_row({mu, cfg.A,
                       cfg.headstart.quasi_stationary ? io::Cell{std::string("quasi-stationary")}
                                                      : io::Cell{cfg.headstart.x},
                       cfg.theta, cfg.step, static_cast<std::int64_t>(cfg.n_paths),
                       std::to_string(cfg.seed), *est.config.t_max, est.mean, est.std_err,
                       static_cast<std::int64_t>(est.n_effective),
                       static_cast<std::int64_t>(est.censored), analytic_mean(cfg)});
  }
  return res;
}

}  // namespace srp::cli
