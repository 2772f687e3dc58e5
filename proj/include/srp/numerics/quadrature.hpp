#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "srp/errors.hpp"
#include "srp/numerics/tolerance.hpp"

namespace srp::numerics {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
};

template <class F>
Panel kronrod15(F& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double res_g = fc * kWg[3];
  double res_k = fc * kWgk[7];
  double res_abs = std::fabs(res_k);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double sum = f1[j] + f2[j];
    res_k += kWgk[j] * sum;
    res_abs += kWgk[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
    if (j % 2 == 1) res_g += kWg[j / 2] * sum;
  }
  const double mean = 0.5 * res_k;
  double res_asc = kWgk[7] * std::fabs(fc - mean);
  for (int j = 0; j < 7; ++j)
    res_asc += kWgk[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));

  const double value = res_k * half;
  res_abs *= std::fabs(half);
  res_asc *= std::fabs(half);
  double err = std::fabs((res_k - res_g) * half);
  if (res_asc != 0.0 && err != 0.0)
    err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  if (res_abs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * res_abs, err);
  return {a, b, value, err};
}

}  // namespace detail

/// Globally adaptive 7/15 Gauss-Kronrod quadrature on a finite interval.
/// The panel with the largest error estimate is bisected until the summed
/// error is within tol.band(result). `tol.max_iter` bounds the number of
/// panels; exceeding it throws SubdivisionLimit carrying the partial sum.
template <class F>
QuadratureResult integrate_adaptive_detailed(F&& f, double a, double b,
                                             const Tolerance& tol) {
  tol.validate();
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw DomainError("integrate_adaptive: need finite a < b");

  std::vector<detail::Panel> panels{detail::kronrod15(f, a, b)};
  double total = panels.front().value, err = panels.front().error;
  while (err > tol.band(total)) {
    if (static_cast<int>(panels.size()) >= tol.max_iter) {
      std::ostringstream os;
      os << "integrate_adaptive: subdivision limit " << tol.max_iter
         << " reached on [" << a << ", " << b << "], estimate " << total
         << " +/- " << err;
      throw SubdivisionLimit(os.str(), total, err);
    }
    auto worst = std::max_element(
        panels.begin(), panels.end(),
        [](const detail::Panel& l, const detail::Panel& r) { return l.error < r.error; });
    const double lo = worst->a, hi = worst->b;
    const double mid = 0.5 * (lo + hi);
    if (!(lo < mid && mid < hi)) {
      std::ostringstream os;
      os << "integrate_adaptive: panel collapsed near " << mid;
      throw SubdivisionLimit(os.str(), total, err);
    }
    *worst = detail::kronrod15(f, lo, mid);
    panels.push_back(detail::kronrod15(f, mid, hi));
    total = 0.0;
    err = 0.0;
    for (const auto& p : panels) {
      total += p.value;
      err += p.error;
    }
  }
  return {total, err, static_cast<int>(panels.size())};
}

template <class F>
double integrate_adaptive(F&& f, double a, double b, const Tolerance& tol) {
  return integrate_adaptive_detailed(std::forward<F>(f), a, b, tol).value;
}

/// Integral over [a, inf) using t = a + u / (1 - u).
template <class F>
double integrate_to_infinity(F&& f, double a, const Tolerance& tol) {
  auto g = [&f, a](double u) {
    const double one_minus = 1.0 - u;
    if (one_minus <= 0.0) return 0.0;
    const double t = a + u / one_minus;
    const double v = f(t) / (one_minus * one_minus);
    return std::isfinite(v) ? v : 0.0;
  };
  return integrate_adaptive(g, 0.0, 1.0, tol);
}

}  // namespace srp::numerics
