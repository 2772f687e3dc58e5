#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "srp/cli/commands.hpp"
#include "srp/mc/simulate.hpp"
#include "srp/numerics/quadrature.hpp"
#include "srp/qsd.hpp"
#include "srp/risk.hpp"
#include "srp/specfun/expint.hpp"
#include "srp/specfun/whittaker.hpp"

namespace srp::cli {

struct CheckOutcome {
  std::string name;
  bool passed = false;
  double value = 0.0;  // measured discrepancy
  double limit = 0.0;
  std::string detail;
};

namespace detail {

inline double rel_err(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

inline CheckOutcome guarded(const std::string& name, const std::function<CheckOutcome()>& body) {
  try {
    CheckOutcome c = body();
    c.name = name;
    return c;
  } catch (const std::exception& e) {
    return {name, false, kNaN, kNaN, std::string("exception: ") + e.what()};
  }
}

inline CheckOutcome within(double value, double limit, std::string detail = {}) {
  return {"", value <= limit, value, limit, std::move(detail)};
}

}  // namespace detail

/// The invariant suite. `fault` perturbs the tabulated W_{1,xi/2} used by
/// the quasi-stationary density, which the identity and mass checks see.
inline std::vector<CheckOutcome> run_selftest(const RunSpec& spec) {
  using detail::guarded;
  using detail::rel_err;
  using detail::within;
  const QsdOptions opt{spec.fault};
  const auto tol = spec.tolerance();
  std::vector<CheckOutcome> out;

  out.push_back(guarded("whittaker_closed_forms", [] {
    double worst = 0.0;
    for (double z : {0.01, 0.1, 1.0, 2.0, 10.0, 40.0}) {
      worst = std::max(worst, rel_err(specfun::whittaker_w({0, 1.0}, z), std::exp(-0.5 * z)));
      worst = std::max(worst, rel_err(specfun::whittaker_w({1, 1.0}, z), z * std::exp(-0.5 * z)));
    }
    return within(worst, 1e-10);
  }));

  out.push_back(guarded("expint_reference", [] {
    const double e = std::max(rel_err(specfun::exp_int_e1(1.0), 0.21938393439552027368),
                              rel_err(specfun::f_func(0.2), 1.4933487469322395729));
    return within(e, 1e-13);
  }));

  out.push_back(guarded("eigenvalue_brackets", [] {
    std::string bad;
    for (double mu : {0.5, 1.0, 2.0})
      for (double A : {5.0, 50.0}) {
        const auto why = check_eigenpair(solve_lambda(Model{mu}, A));
        if (!why.empty()) bad += "mu=" + io::format_real(mu) + " A=" + io::format_real(A) + ": " + why;
      }
    return CheckOutcome{"", bad.empty(), bad.empty() ? 0.0 : 1.0, 0.0, bad};
  }));

  out.push_back(guarded("delay_identity", [&] {
    double worst = 0.0;
    for (auto [mu, A] : {std::pair{1.0, 10.0}, std::pair{0.5, 5.0}}) {
      const QsdEval q(solve_lambda(Model{mu}, A), opt);
      worst = std::max(worst, rel_err(srp_delay_direct(q, tol), srp_delay(q, tol)));
    }
    return within(worst, 1e-6);
  }));

  out.push_back(guarded("qsd_mass", [&] {
    const QsdEval q(solve_lambda(Model{1.0}, 10.0), opt);
    auto t = tol;
    t.rel = 1e-11;
    const double mass = numerics::integrate_adaptive([&](double x) { return q.pdf(x); }, 0.0, 10.0, t);
    return within(std::fabs(mass - 1.0), 1e-8);
  }));

  out.push_back(guarded("qsd_mean", [&] {
    const QsdEval q(solve_lambda(Model{1.0}, 10.0), opt);
    auto t = tol;
    t.rel = 1e-11;
    const double m = numerics::integrate_adaptive([&](double x) { return x * q.pdf(x); }, 0.0, 10.0, t);
    return within(rel_err(m, qsd_mean(q.eigen())), 1e-5);
  }));

  out.push_back(guarded("risk_row", [&] {
    const auto r = compute_risk_report(Model{1.0}, 10.0, tol);
    const auto why = check_risk_report(r);
    return CheckOutcome{"", why.empty(), r.gap, r.gap_bound, why};
  }));

  auto mc_check = [&](double theta) {
    mc::SimConfig cfg;
    cfg.model = Model{1.0};
    cfg.A = 5.0;
    cfg.headstart = mc::Headstart::fixed(0.0);
    cfg.theta = theta;
    cfg.step = spec.step;
    cfg.n_paths = spec.path_count();
    cfg.seed = spec.seed;
    const auto est = mc::simulate_gsr_passage(cfg);
    const double target = analytic_mean(cfg);
    return within(std::fabs(est.mean - target) / est.std_err, 3.0,
                  "mean " + io::format_real(est.mean) + " vs " + io::format_real(target));
  };
  out.push_back(guarded("mc_false_alarm", [&] { return mc_check(mc::kNever); }));
  out.push_back(guarded("mc_delay", [&] { return mc_check(0.0); }));
  return out;
}

/// check,status,value,limit,detail; exit code 1 when any check fails.
inline CommandResult cmd_selftest(const RunSpec& spec) {
  spec.validate();
  CommandResult res;
  res.table.header = spec.echo();
  res.table.columns = {"check", "status", "value", "limit", "detail"};
  for (const auto& c : run_selftest(spec)) {
    if (!c.passed) res.exit_code = 1;
    res.table.add_row({c.name, std::string(c.passed ? "pass" : "FAIL"), c.value, c.limit,
                       detail::one_line(c.detail)});
  }
  return res;
}

}  // namespace srp::cli
