#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "srp/errors.hpp"

namespace srp::specfun {

namespace detail {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kSeriesCrossover = 1.5;

// E1(x) = -gamma - ln x - sum_{n>=1} (-x)^n / (n n!),  0 < x <= 1.5.
inline double e1_series(double x) {
  double sum = 0.0;
  double term = 1.0;  // (-x)^n / n!
  for (int n = 1; n < 200; ++n) {
    term *= -x / n;
    const double add = term / n;
    sum += add;
    if (std::fabs(add) < 1e-17 * std::fabs(sum)) break;
  }
  return -kEulerGamma - std::log(x) - sum;
}

// e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...))), modified Lentz, x > 1.
inline double scaled_e1_fraction(double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double del = c * d;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw NonConvergence("scaled_e1_fraction: continued fraction did not converge at x=" +
                       std::to_string(x));
}

inline void require_positive(double x, const char* who) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError(std::string(who) + ": argument must be positive and finite, got " +
                      std::to_string(x));
}

}  // namespace detail

/// Exponential integral E1(x) = int_x^inf e^{-t}/t dt for x > 0.
/// Underflows to zero beyond x ~ 740.
inline double exp_int_e1(double x) {
  detail::require_positive(x, "exp_int_e1");
  if (x <= detail::kSeriesCrossover) return detail::e1_series(x);
  return std::exp(-x) * detail::scaled_e1_fraction(x);
}

/// F(x) = e^x E1(x). Positive, nonincreasing, bounded by 1/x. The continued
/// fraction is used directly above the crossover so large x never forms e^x.
inline double f_func(double x) {
  detail::require_positive(x, "f_func");
  if (x <= detail::kSeriesCrossover) return std::exp(x) * detail::e1_series(x);
  return detail::scaled_e1_fraction(x);
}

}  // namespace srp::specfun
