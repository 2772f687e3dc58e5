#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "srp/errors.hpp"
#include "srp/numerics/root.hpp"
#include "srp/specfun/whittaker.hpp"

namespace srp {

/// Post-change drift of the observed Brownian motion.
struct Model {
  double mu = 1.0;

  void validate() const {
    if (!(mu != 0.0) || !std::isfinite(mu))
      throw DomainError("Model: mu must be finite and nonzero");
  }
  double mu2() const { return mu * mu; }
  double abs_mu() const { return std::fabs(mu); }
  // Whittaker argument 2 / (mu^2 x) at statistic level x.
  double argument(double x) const { return 2.0 / (mu2() * x); }
};

/// Detection threshold A with the smallest eigenvalue lambda of the
/// quasi-stationary problem; xi2 = 1 - 8 lambda / mu^2.
struct EigenPair {
  Model model;
  double A = 0.0;
  double lambda = 0.0;
  double xi2 = 1.0;

  static EigenPair make(const Model& m, double A, double lambda) {
    return {m, A, lambda, 1.0 - 8.0 * lambda / m.mu2()};
  }
};

struct Interval {
  double lo, hi;
};

/// Bracket [1/A, 1/A + (1 + sqrt(4 mu^2 A + 1)) / (2 mu^2 A^2)] for lambda_A.
inline Interval eigenvalue_bracket(const Model& m, double A) {
  const double lo = 1.0 / A;
  const double hi = lo + (1.0 + std::sqrt(4.0 * m.mu2() * A + 1.0)) / (2.0 * m.mu2() * A * A);
  return {lo, hi};
}

/// W_{1, xi(lambda)/2}(2 / (mu^2 A)); its first zero in lambda is lambda_A.
inline double eigen_residual(const Model& m, double A, double lambda) {
  return specfun::whittaker_w({1, 1.0 - 8.0 * lambda / m.mu2()}, m.argument(A));
}

// Magnitude used to judge eigen_residual: the leading z e^{-z/2} behaviour.
inline double eigen_residual_scale(const Model& m, double A) {
  const double z = m.argument(A);
  return z * std::exp(-0.5 * z);
}

inline numerics::Tolerance default_lambda_tolerance() {
  numerics::Tolerance t;
  t.rel = 1e-12;
  t.abs = 0.0;
  t.max_iter = 200;
  return t;
}

inline constexpr int kLambdaScanPanels = 64;

/// Smallest lambda in the eigenvalue bracket with W_{1,xi/2}(2/(mu^2 A)) = 0.
/// The bracket is scanned left to right in 64 panels and Brent's method is
/// run on the first panel that changes sign.
inline EigenPair solve_lambda(const Model& model, double A,
                              const numerics::Tolerance& tol = default_lambda_tolerance()) {
  model.validate();
  if (!(A > 0.0) || !std::isfinite(A))
    throw DomainError("solve_lambda: threshold A must be positive, got " + std::to_string(A));
  const auto br = eigenvalue_bracket(model, A);
  auto g = [&](double lambda) { return eigen_residual(model, A, lambda); };
  const auto panel = numerics::scan_first_sign_change(g, br.lo, br.hi, kLambdaScanPanels);
  if (!panel) {
    std::ostringstream os;
    os << "solve_lambda: no sign change of W_{1,xi/2}(" << model.argument(A)
       << ") for lambda in [" << br.lo << ", " << br.hi << "] (mu=" << model.mu
       << ", A=" << A << "); residual at ends " << g(br.lo) << ", " << g(br.hi);
    throw NoSignChange(os.str(), br.lo, br.hi, g(br.lo), g(br.hi));
  }
  const double lambda = numerics::brent_on_bracket(g, *panel, tol);
  return EigenPair::make(model, A, lambda);
}

/// Checks the EigenPair invariants; returns an empty string when all hold.
inline std::string check_eigenpair(const EigenPair& e, double residual_tol = 1e-9) {
  std::ostringstream os;
  const auto br = eigenvalue_bracket(e.model, e.A);
  const double slack = 1e-12 * br.hi;
  if (e.lambda < br.lo - slack) os << "lambda below 1/A; ";
  if (e.lambda > br.hi + slack) os << "lambda above upper bracket; ";
  if (e.xi2 != 1.0 - 8.0 * e.lambda / e.model.mu2()) os << "xi2 inconsistent; ";
  const double r = eigen_residual(e.model, e.A, e.lambda);
  if (std::fabs(r) > residual_tol * eigen_residual_scale(e.model, e.A))
    os << "eigen residual " << r << " too large; ";
  return os.str();
}

struct QsdOptions {
  // Relative perturbation applied to the tabulated W_{1,xi/2}; used only to
  // demonstrate that the consistency checks catch a faulty evaluator.
  double whittaker_fault = 0.0;
};

/// Quasi-stationary law for one EigenPair. Both Whittaker functions are
/// tabulated once on [2/(mu^2 A), inf) so pdf/cdf calls are cheap.
class QsdEval {
public:
  explicit QsdEval(const EigenPair& e, const QsdOptions& opt = {})
      : eigen_(e),
        z_A_(e.model.argument(e.A)),
        w0_({0, e.xi2}, z_A_),
        w1_({1, e.xi2}, z_A_, opt.whittaker_fault) {
    normalizer_ = w0_.damped(z_A_);
    if (!(normalizer_ > 0.0) || !std::isfinite(normalizer_))
      throw InvariantViolation("QsdEval: normalizer must be positive");
  }

  const EigenPair& eigen() const { return eigen_; }
  double normalizer() const { return normalizer_; }
  double threshold() const { return eigen_.A; }

  double pdf(double x) const {
    const double A = eigen_.A;
    if (!(x > 0.0) || x >= A || x < kUnderflowFraction * A) return 0.0;
    const double z = eigen_.model.argument(x);
    return std::max(0.0, w1_.damped(z) / (x * normalizer_));
  }

  double cdf(double x) const {
    const double A = eigen_.A;
    if (x >= A) return 1.0;
    if (!(x > 0.0) || x < kUnderflowFraction * A) return 0.0;
    const double z = eigen_.model.argument(x);
    return std::clamp(w0_.damped(z) / normalizer_, 0.0, 1.0);
  }

  // Below A * 1e-8 both pdf and cdf are exactly zero (net e^{-2/(mu^2 x)} decay).
  static constexpr double kUnderflowFraction = 1e-8;

private:
  EigenPair eigen_;
  double z_A_;
  specfun::WhittakerProfile w0_, w1_;
  double normalizer_ = 1.0;
};

inline double qsd_pdf(const QsdEval& q, double x) { return q.pdf(x); }
inline double qsd_cdf(const QsdEval& q, double x) { return q.cdf(x); }

/// E[Z] = A - 1/lambda.
inline double qsd_mean(const EigenPair& e) { return e.A - 1.0 / e.lambda; }

/// Var[Z] = (lambda - mu^2 (A lambda - 1)^2) / (lambda^2 (mu^2 + lambda)).
inline double qsd_var(const EigenPair& e) {
  const double mu2 = e.model.mu2();
  const double excess = e.A * e.lambda - 1.0;
  return (e.lambda - mu2 * excess * excess) / (e.lambda * e.lambda * (mu2 + e.lambda));
}

/// Inverse-cdf transform of a uniform variate.
inline double qsd_sample(const QsdEval& q, double u) {
  const double A = q.threshold();
  if (!(u > 0.0)) return 0.0;
  if (u >= 1.0) return A;
  numerics::Tolerance tol;
  tol.rel = 1e-14;
  tol.abs = 1e-13 * A;
  tol.max_iter = 300;
  auto g = [&q, u](double x) { return q.cdf(x) - u; };
  return numerics::brent_on_bracket(g, {0.0, A, -u, 1.0 - u}, tol);
}

}  // namespace srp
