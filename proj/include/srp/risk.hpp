#pragma once

#include <cmath>
#include <iostream>
#include <sstream>
#include <string>

#include "srp/errors.hpp"
#include "srp/numerics/quadrature.hpp"
#include "srp/numerics/root.hpp"
#include "srp/qsd.hpp"
#include "srp/specfun/expint.hpp"

namespace srp {

/// One row of the minimax analysis at ARL level T.
struct RiskReport {
  Model model;
  double T = 0.0;
  double A_T = 0.0;
  double lambda = 0.0;
  double B = 0.0;          // generalized-Bayes lower bound
  double C = 0.0;          // SRP delay risk at A_T
  double gap = 0.0;        // C - B
  double gap_bound = 0.0;  // (2/mu^2)(J1 bound + J2 bound)
};

inline numerics::Tolerance default_risk_tolerance() {
  numerics::Tolerance t;
  t.rel = 1e-9;
  t.abs = 0.0;
  t.max_iter = 4000;
  return t;
}

namespace detail {
inline void require_headstart(double A, double x, const char* who) {
  if (!(A > 0.0)) throw DomainError(std::string(who) + ": A must be positive");
  if (!(x >= 0.0 && x <= A))
    throw DomainError(std::string(who) + ": headstart must lie in [0, A], got " +
                      std::to_string(x));
}
}  // namespace detail

/// Pre-change ARL of the headstarted SR rule: A - x.
inline double arl_gsr(double A, double x) {
  detail::require_headstart(A, x, "arl_gsr");
  return A - x;
}

/// Delay when the change is in effect from the start:
/// (2/mu^2) [F(2/(mu^2 A)) - F(2/(mu^2 x))], with F(inf) = 0 at x = 0.
inline double add0_gsr(const Model& m, double A, double x) {
  m.validate();
  detail::require_headstart(A, x, "add0_gsr");
  if (x == A) return 0.0;
  const double top = specfun::f_func(m.argument(A));
  const double start = (x > 0.0) ? specfun::f_func(m.argument(x)) : 0.0;
  return (2.0 / m.mu2()) * (top - start);
}

/// (2/(mu^2 T)) int_0^T F(2/(mu^2 x)) dx/x, the nonnegative tail term of B(T).
/// The integrand tends to mu^2/2 as x -> 0.
inline double lower_bound_tail(const Model& m, double T,
                               const numerics::Tolerance& tol = default_risk_tolerance()) {
  m.validate();
  if (!(T > 0.0)) throw DomainError("lower_bound_B: T must be positive");
  auto integrand = [&m](double x) {
    if (x <= 0.0) return 0.5 * m.mu2();
    return specfun::f_func(m.argument(x)) / x;
  };
  return m.argument(T) * numerics::integrate_adaptive(integrand, 0.0, T, tol);
}

/// Generalized-Bayes lower bound
/// B(T) = (2/mu^2) {F(2/(mu^2 T)) - 1 + (2/(mu^2 T)) int_0^T F(2/(mu^2 x)) dx/x}.
inline double lower_bound_B(const Model& m, double T,
                            const numerics::Tolerance& tol = default_risk_tolerance()) {
  const double tail = lower_bound_tail(m, T, tol);
  return (2.0 / m.mu2()) * (specfun::f_func(m.argument(T)) - 1.0 + tail);
}

/// SRP delay risk in the integrated-by-parts form
/// (2/mu^2) {F(2/(mu^2 A)) - 1 + (2 lambda/mu^2) int_0^A F(2/(mu^2 x)) Q_A(x) dx/x}.
inline double srp_delay(const QsdEval& q,
                        const numerics::Tolerance& tol = default_risk_tolerance()) {
  const EigenPair& e = q.eigen();
  const Model& m = e.model;
  const double cut = QsdEval::kUnderflowFraction * e.A;
  auto integrand = [&](double x) {
    if (x < cut) return 0.0;
    return specfun::f_func(m.argument(x)) * q.cdf(x) / x;
  };
  const double I = numerics::integrate_adaptive(integrand, 0.0, e.A, tol);
  return (2.0 / m.mu2()) *
         (specfun::f_func(m.argument(e.A)) - 1.0 + (2.0 * e.lambda / m.mu2()) * I);
}

inline double srp_delay(const EigenPair& e,
                        const numerics::Tolerance& tol = default_risk_tolerance()) {
  return srp_delay(QsdEval(e), tol);
}

/// SRP delay risk as the headstart average int_0^A add0_gsr(A, x) q_A(x) dx.
inline double srp_delay_direct(const QsdEval& q,
                               const numerics::Tolerance& tol = default_risk_tolerance()) {
  const EigenPair& e = q.eigen();
  auto integrand = [&](double x) {
    const double p = q.pdf(x);
    return p == 0.0 ? 0.0 : add0_gsr(e.model, e.A, x) * p;
  };
  return numerics::integrate_adaptive(integrand, 0.0, e.A, tol);
}

inline double srp_delay_direct(const EigenPair& e,
                               const numerics::Tolerance& tol = default_risk_tolerance()) {
  return srp_delay_direct(QsdEval(e), tol);
}

struct CalibrationResult {
  EigenPair eigen;
  int sign_changes = 0;  // over the scan of [T, T + sqrt(T)/|mu|]
};

inline constexpr int kCalibrationScanPanels = 8;

/// Threshold A_T in [T, T + sqrt(T)/|mu|] with lambda_{A_T} = 1/T, found by a
/// scan followed by Brent's method on lambda_A T - 1. Monotonicity of
/// lambda_A in A is not assumed; the smallest root is taken.
inline CalibrationResult calibrate_threshold_detailed(const Model& m, double T,
                                                      const numerics::Tolerance& tol) {
  m.validate();
  if (!(T > 0.0) || !std::isfinite(T))
    throw DomainError("calibrate_threshold: T must be positive");
  const double lo = T;
  const double hi = T + std::sqrt(T) / m.abs_mu();
  auto g = [&](double A) { return solve_lambda(m, A).lambda * T - 1.0; };
  const auto scan = numerics::scan_sign_changes(g, lo, hi, kCalibrationScanPanels);
  if (!scan.first) {
    std::ostringstream os;
    os << "calibrate_threshold: lambda_A T - 1 keeps its sign on [" << lo << ", " << hi
       << "] (mu=" << m.mu << ", T=" << T << "), values " << g(lo) << ", " << g(hi);
    throw NoSignChange(os.str(), lo, hi, g(lo), g(hi));
  }
  const double A_T = numerics::brent_on_bracket(g, *scan.first, tol);
  return {solve_lambda(m, A_T), scan.sign_changes};
}

inline numerics::Tolerance default_calibration_tolerance(double T) {
  numerics::Tolerance t;
  t.rel = 1e-14;
  t.abs = 1e-11 * T;
  t.max_iter = 200;
  return t;
}

inline EigenPair calibrate_threshold(const Model& m, double T) {
  auto r = calibrate_threshold_detailed(m, T, default_calibration_tolerance(T));
  if (r.sign_changes > 1)
    std::clog << "warning: calibrate_threshold(mu=" << m.mu << ", T=" << T << ") saw "
              << r.sign_changes << " sign changes; using the smallest threshold\n";
  return r.eigen;
}

inline double gap_bound(const Model& m, double T) {
  const double r = 1.0 / (m.abs_mu() * std::sqrt(T));
  const double j1 = r;
  const double j2 = (1.0 + r) * r;
  return (2.0 / m.mu2()) * (j1 + j2);
}

/// Returns an empty string when the report satisfies its invariants.
inline std::string check_risk_report(const RiskReport& r, double numeric_tol = 1e-8) {
  std::ostringstream os;
  const double upper = r.T + std::sqrt(r.T) / r.model.abs_mu();
  if (r.A_T < r.T * (1.0 - 1e-12) || r.A_T > upper * (1.0 + 1e-12))
    os << "A_T outside [T, T + sqrt(T)/|mu|]; ";
  if (std::fabs(r.lambda * r.T - 1.0) > numeric_tol) os << "lambda T != 1; ";
  if (r.gap < -numeric_tol) os << "negative gap " << r.gap << "; ";
  if (r.gap > r.gap_bound + numeric_tol) os << "gap exceeds bound; ";
  return os.str();
}

/// Calibrates A_T and evaluates B(T), the SRP risk and the bound. The
/// invariants are not checked here; see check_risk_report().
inline RiskReport compute_risk_report(const Model& m, double T,
                                      const numerics::Tolerance& tol = default_risk_tolerance()) {
  const EigenPair e = calibrate_threshold(m, T);
  RiskReport r;
  r.model = m;
  r.T = T;
  r.A_T = e.A;
  r.lambda = e.lambda;
  r.B = lower_bound_B(m, T, tol);
  r.C = srp_delay(QsdEval(e), tol);
  r.gap = r.C - r.B;
  r.gap_bound = gap_bound(m, T);
  return r;
}

/// compute_risk_report() followed by the invariant check.
inline RiskReport optimality_gap(const Model& m, double T,
                                 const numerics::Tolerance& tol = default_risk_tolerance()) {
  RiskReport r = compute_risk_report(m, T, tol);
  if (auto bad = check_risk_report(r); !bad.empty())
    throw InvariantViolation("optimality_gap(mu=" + std::to_string(m.mu) +
                             ", T=" + std::to_string(T) + "): " + bad);
  return r;
}

}  // namespace srp
