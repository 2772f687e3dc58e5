#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "srp/errors.hpp"
#include "srp/numerics/tolerance.hpp"

namespace srp::numerics {

struct Bracket {
  double lo, hi;
  double f_lo, f_hi;
};

struct ScanResult {
  std::optional<Bracket> first;  // leftmost panel with a sign change
  int sign_changes = 0;
};

namespace detail {
inline bool opposite_or_zero(double a, double b) {
  return (a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0);
}
}  // namespace detail

// Brent's zeroin on a bracket whose endpoint values are already known.
template <class F>
double brent_on_bracket(F&& f, Bracket br, const Tolerance& tol) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double a = br.lo, b = br.hi, fa = br.f_lo, fb = br.f_hi;
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;

  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 0; iter < tol.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * eps * std::fabs(b) + 0.5 * tol.band(b);
    const double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || fb == 0.0) return b;

    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      // Secant or inverse quadratic interpolation.
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      const double min1 = 3.0 * xm * q - std::fabs(tol1 * q);
      const double min2 = std::fabs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::fabs(d) > tol1) ? d : std::copysign(tol1, xm);
    fb = f(b);
    if (!std::isfinite(fb)) {
      std::ostringstream os;
      os << "find_root_bracketed: non-finite f(" << b << ")";
      throw NonConvergence(os.str());
    }
  }
  std::ostringstream os;
  os << "find_root_bracketed: no convergence after " << tol.max_iter
     << " iterations, bracket [" << std::min(b, c) << ", " << std::max(b, c) << "]";
  throw NonConvergence(os.str());
}

/// Root of `f` on [lo, hi] by Brent's method. Requires f(lo) and f(hi) of
/// opposite sign (a zero at either end is accepted); otherwise throws
/// NoSignChange so the caller can fall back to scan_sign_changes().
template <class F>
double find_root_bracketed(F&& f, double lo, double hi, const Tolerance& tol) {
  tol.validate();
  if (!(lo < hi)) throw DomainError("find_root_bracketed: need lo < hi");
  const double f_lo = f(lo), f_hi = f(hi);
  if (!std::isfinite(f_lo) || !std::isfinite(f_hi))
    throw DomainError("find_root_bracketed: f not finite at bracket ends");
  if (!detail::opposite_or_zero(f_lo, f_hi)) {
    std::ostringstream os;
    os << "find_root_bracketed: no sign change on [" << lo << ", " << hi
       << "], f = (" << f_lo << ", " << f_hi << ")";
    throw NoSignChange(os.str(), lo, hi, f_lo, f_hi);
  }
  return brent_on_bracket(f, Bracket{lo, hi, f_lo, f_hi}, tol);
}

/// Evaluates `f` on `panels + 1` equispaced points and reports the leftmost
/// panel showing a sign change together with the total number of changes.
template <class F>
ScanResult scan_sign_changes(F&& f, double lo, double hi, int panels) {
  if (!(lo < hi) || panels <= 0)
    throw DomainError("scan_sign_changes: need lo < hi and panels > 0");
  ScanResult out;
  double x_prev = lo, f_prev = f(lo);
  for (int i = 1; i <= panels; ++i) {
    const double x = (i == panels) ? hi : lo + (hi - lo) * i / panels;
    const double fx = f(x);
    if (detail::opposite_or_zero(f_prev, fx) && !(f_prev == 0.0 && i > 1)) {
      ++out.sign_changes;
      if (!out.first) out.first = Bracket{x_prev, x, f_prev, fx};
    }
    x_prev = x;
    f_prev = fx;
  }
  return out;
}

/// Left-to-right scan that stops at the first panel showing a sign change.
template <class F>
std::optional<Bracket> scan_first_sign_change(F&& f, double lo, double hi, int panels) {
  if (!(lo < hi) || panels <= 0)
    throw DomainError("scan_first_sign_change: need lo < hi and panels > 0");
  double x_prev = lo, f_prev = f(lo);
  for (int i = 1; i <= panels; ++i) {
    const double x = (i == panels) ? hi : lo + (hi - lo) * i / panels;
    const double fx = f(x);
    if (detail::opposite_or_zero(f_prev, fx)) return Bracket{x_prev, x, f_prev, fx};
    x_prev = x;
    f_prev = fx;
  }
  return std::nullopt;
}

}  // namespace srp::numerics
