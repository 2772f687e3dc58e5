#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "srp/errors.hpp"
#include "srp/numerics/tolerance.hpp"

namespace srp::numerics {

struct MarchResult {
  double w = 0.0;
  double dw = 0.0;
  // Accumulated local error, measured relative to the solution scale and
  // rescaled to the final magnitude.
  double error_estimate = 0.0;
  int steps = 0;
};

/// Coefficient of the Whittaker equation written as w'' = c(z) w.
struct WhittakerCoefficient {
  int k;
  double xi2;
  double operator()(double z) const {
    return 0.25 - k / z - 0.25 * (1.0 - xi2) / (z * z);
  }
};

namespace detail {

// Dormand-Prince 5(4) tableau.
struct DP5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b - b_hat (error weights)
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

}  // namespace detail

/// Integrates the linear second-order equation w'' = coef(z) w from z_from to
/// z_to (either direction) with an adaptive Dormand-Prince 5(4) pair.
/// `on_step(z, w, dw)` is invoked at the start point and after every
/// accepted step, which lets callers build a dense table of the solution.
template <class Coef, class OnStep>
MarchResult march_linear_ode(const Coef& coef, double z_from, double z_to,
                             double w0, double dw0, const Tolerance& tol,
                             OnStep&& on_step) {
  using T = detail::DP5;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  tol.validate();

  MarchResult out{w0, dw0, 0.0, 0};
  on_step(z_from, w0, dw0);
  if (z_from == z_to || (w0 == 0.0 && dw0 == 0.0)) {
    if (z_from != z_to) on_step(z_to, 0.0, 0.0);
    return out;
  }

  const double dir = (z_to < z_from) ? -1.0 : 1.0;
  double z = z_from, w = w0, dw = dw0;
  const double span = std::fabs(z_to - z_from);
  const double start_scale = (z_from != 0.0) ? std::fabs(z_from) : span;
  double h = dir * std::min({1.0, 0.05 * start_scale, span});
  double rel_err_sum = 0.0;

  auto rhs = [&coef](double zz, double ww, double vv, double& dww, double& dvv) {
    dww = vv;
    dvv = coef(zz) * ww;
  };

  double k1w, k1v;
  rhs(z, w, dw, k1w, k1v);
  while (dir * (z_to - z) > 0.0) {
    if (out.steps >= tol.max_iter) {
      std::ostringstream os;
      os << "march_linear_ode: step budget " << tol.max_iter << " exhausted at z=" << z;
      throw StepUnderflow(os.str(), z);
    }
    // Never step more than half way to the origin; the equation is singular there.
    double h_max = std::fabs(z_to - z);
    if (dir < 0.0) h_max = std::min(h_max, 0.5 * z);
    if (std::fabs(h) > h_max) h = dir * h_max;
    if (std::fabs(h) < 16.0 * eps * std::fabs(z)) {
      std::ostringstream os;
      os << "march_linear_ode: step size underflow at z=" << z;
      throw StepUnderflow(os.str(), z);
    }

    double k2w, k2v, k3w, k3v, k4w, k4v, k5w, k5v, k6w, k6v, k7w, k7v;
    rhs(z + T::c2 * h, w + h * (T::a21 * k1w), dw + h * (T::a21 * k1v), k2w, k2v);
    rhs(z + T::c3 * h, w + h * (T::a31 * k1w + T::a32 * k2w),
        dw + h * (T::a31 * k1v + T::a32 * k2v), k3w, k3v);
    rhs(z + T::c4 * h, w + h * (T::a41 * k1w + T::a42 * k2w + T::a43 * k3w),
        dw + h * (T::a41 * k1v + T::a42 * k2v + T::a43 * k3v), k4w, k4v);
    rhs(z + T::c5 * h,
        w + h * (T::a51 * k1w + T::a52 * k2w + T::a53 * k3w + T::a54 * k4w),
        dw + h * (T::a51 * k1v + T::a52 * k2v + T::a53 * k3v + T::a54 * k4v), k5w, k5v);
    const double z_new = (std::fabs(z_to - (z + h)) <= 4.0 * eps * std::fabs(z_to)) ? z_to : z + h;
    rhs(z_new,
        w + h * (T::a61 * k1w + T::a62 * k2w + T::a63 * k3w + T::a64 * k4w + T::a65 * k5w),
        dw + h * (T::a61 * k1v + T::a62 * k2v + T::a63 * k3v + T::a64 * k4v + T::a65 * k5v),
        k6w, k6v);
    const double w_new =
        w + h * (T::b1 * k1w + T::b3 * k3w + T::b4 * k4w + T::b5 * k5w + T::b6 * k6w);
    const double dw_new =
        dw + h * (T::b1 * k1v + T::b3 * k3v + T::b4 * k4v + T::b5 * k5v + T::b6 * k6v);
    rhs(z_new, w_new, dw_new, k7w, k7v);

    const double ew = h * (T::e1 * k1w + T::e3 * k3w + T::e4 * k4w + T::e5 * k5w +
                           T::e6 * k6w + T::e7 * k7w);
    const double ev = h * (T::e1 * k1v + T::e3 * k3v + T::e4 * k4v + T::e5 * k5v +
                           T::e6 * k6v + T::e7 * k7v);
    const double scale_mag =
        std::max({std::fabs(w), std::fabs(dw), std::fabs(w_new), std::fabs(dw_new)});
    const double scale = tol.abs + tol.rel * scale_mag;
    const double err = std::max(std::fabs(ew), std::fabs(ev)) / scale;

    if (!std::isfinite(err)) {
      h *= 0.2;
      continue;
    }
    if (err <= 1.0) {
      z = z_new;
      w = w_new;
      dw = dw_new;
      k1w = k7w;
      k1v = k7v;
      ++out.steps;
      if (scale_mag > 0.0) rel_err_sum += std::max(std::fabs(ew), std::fabs(ev)) / scale_mag;
      on_step(z, w, dw);
    }
    const double factor =
        (err == 0.0) ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= (err <= 1.0) ? factor : std::min(factor, 1.0);
  }
  out.w = w;
  out.dw = dw;
  out.error_estimate = rel_err_sum * std::max(std::fabs(w), std::fabs(dw));
  return out;
}

template <class Coef>
MarchResult march_linear_ode(const Coef& coef, double z_from, double z_to,
                             double w0, double dw0, const Tolerance& tol) {
  return march_linear_ode(coef, z_from, z_to, w0, dw0, tol,
                          [](double, double, double) {});
}

/// Marches the Whittaker equation w'' = (1/4 - k/z - (1 - xi2)/(4 z^2)) w
/// inward from z_from to z_to (0 < z_to < z_from).
inline MarchResult march_whittaker_ode(int k, double xi2, double z_from, double z_to,
                                       double w0, double dw0, const Tolerance& tol) {
  if (!(z_from > z_to && z_to > 0.0))
    throw DomainError("march_whittaker_ode: need z_from > z_to > 0");
  return march_linear_ode(WhittakerCoefficient{k, xi2}, z_from, z_to, w0, dw0, tol);
}

}  // namespace srp::numerics
