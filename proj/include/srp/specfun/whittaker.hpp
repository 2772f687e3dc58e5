#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "srp/errors.hpp"
#include "srp/numerics/ode.hpp"

namespace srp::specfun {

/// Index pair of W_{k, xi/2}. The second index is carried only through
/// xi2 = xi^2, which keeps every coefficient real when xi is imaginary.
struct WhittakerIndex {
  int k = 0;
  double xi2 = 1.0;

  void validate() const {
    if (k != 0 && k != 1)
      throw DomainError("WhittakerIndex: k must be 0 or 1, got " + std::to_string(k));
    if (!std::isfinite(xi2)) throw DomainError("WhittakerIndex: xi2 must be finite");
  }
};

struct WhittakerValue {
  double w;
  double dw;
};

namespace detail {

inline constexpr double kSeedFloor = 40.0;     // smallest seeding point
inline constexpr double kSeedCeiling = 1200.0; // e^{-z/2} still representable
inline constexpr double kSeedAccuracy = 1e-15;

inline numerics::Tolerance march_tolerance() {
  numerics::Tolerance t;
  t.rel = 1e-13;
  t.abs = 0.0;
  t.max_iter = 200000;
  return t;
}

// S(z) with W = e^{-z/2} z^k S(z), summed to its smallest term.
struct SeriesValue {
  double s = 1.0;
  double ds = 0.0;  // dS/dz
  double rel_err = 0.0;
};

inline SeriesValue asymptotic_series(const WhittakerIndex& idx, double z) {
  SeriesValue out;
  double term = 1.0;
  double sum = 1.0, dsum = 0.0;
  const double quarter_xi2 = 0.25 * idx.xi2;
  for (int j = 0; j < 20000; ++j) {
    const double a = j + 0.5 - idx.k;
    const double num = a * a - quarter_xi2;
    const double ratio = -num / ((j + 1) * z);
    const double next = term * ratio;
    // Past the hump the terms grow like j/z: the series has started to diverge.
    if (std::fabs(ratio) >= 1.0 && a * a >= std::fabs(quarter_xi2)) {
      out.rel_err = std::fabs(term) / std::fabs(sum);
      break;
    }
    sum += next;
    dsum += -(j + 1) * next / z;
    term = next;
    if (std::fabs(next) <= 1e-17 * std::fabs(sum)) {
      out.rel_err = std::fabs(next) / std::fabs(sum);
      break;
    }
    if (!std::isfinite(sum)) {
      out.rel_err = HUGE_VAL;
      break;
    }
  }
  out.s = sum;
  out.ds = dsum;
  return out;
}

// Seeding point z0 >= max(40, 2 z) where the asymptotic series is accurate.
inline double seed_point(const WhittakerIndex& idx, double z, SeriesValue& series) {
  double z0 = std::max(kSeedFloor, 2.0 * z);
  for (;;) {
    series = asymptotic_series(idx, z0);
    if (series.rel_err <= kSeedAccuracy) return z0;
    z0 *= 2.0;
    if (z0 > kSeedCeiling) {
      std::ostringstream os;
      os << "whittaker_w: asymptotic seed not accurate below z=" << kSeedCeiling
         << " for k=" << idx.k << ", xi2=" << idx.xi2;
      throw AccuracyNotAchieved(os.str());
    }
  }
}

// (w, w') scaled by e^{z/2}, from the series.
inline WhittakerValue scaled_from_series(const WhittakerIndex& idx, double z,
                                         const SeriesValue& s) {
  const double zk = idx.k == 0 ? 1.0 : z;
  return {zk * s.s, zk * ((-0.5 + idx.k / z) * s.s + s.ds)};
}

inline void require_argument(double z) {
  if (!(z > 0.0) || !std::isfinite(z))
    throw DomainError("whittaker_w: argument must be positive and finite, got " +
                      std::to_string(z));
}

}  // namespace detail

/// W_{k, xi/2}(z) together with its z-derivative.
///
/// For z >= 40 the large-argument series is summed to its smallest term when
/// that reaches double precision. Otherwise the series seeds (w, w') at
/// z0 = max(40, 2z) (pushed outward until the seed is accurate) and the
/// Whittaker equation is marched inward to z. W is recessive at +inf, so any
/// admixture of the dominant solution decays along the march.
inline WhittakerValue whittaker_w_with_derivative(const WhittakerIndex& idx, double z) {
  idx.validate();
  detail::require_argument(z);
  if (z >= detail::kSeedFloor) {
    const auto s = detail::asymptotic_series(idx, z);
    if (s.rel_err <= detail::kSeedAccuracy) {
      const auto scaled = detail::scaled_from_series(idx, z, s);
      const double damp = std::exp(-0.5 * z);
      return {scaled.w * damp, scaled.dw * damp};
    }
  }
  detail::SeriesValue s;
  const double z0 = detail::seed_point(idx, z, s);
  const auto seed = detail::scaled_from_series(idx, z0, s);
  const auto r = numerics::march_whittaker_ode(idx.k, idx.xi2, z0, z, seed.w, seed.dw,
                                               detail::march_tolerance());
  const double mag = std::max(std::fabs(r.w), std::fabs(r.dw));
  if (mag > 0.0 && r.error_estimate > 1e-9 * mag) {
    std::ostringstream os;
    os << "whittaker_w: march error " << r.error_estimate / mag << " at z=" << z
       << " (k=" << idx.k << ", xi2=" << idx.xi2 << ")";
    throw AccuracyNotAchieved(os.str());
  }
  const double damp = std::exp(-0.5 * z0);
  return {r.w * damp, r.dw * damp};
}

inline double whittaker_w(const WhittakerIndex& idx, double z) {
  return whittaker_w_with_derivative(idx, z).w;
}

/// e^{-z/2} W_{k,xi/2}(z), which decays like z^k e^{-z}; safe for huge z.
inline double whittaker_w_damped(const WhittakerIndex& idx, double z) {
  idx.validate();
  detail::require_argument(z);
  if (z >= detail::kSeedFloor) {
    const auto s = detail::asymptotic_series(idx, z);
    if (s.rel_err <= detail::kSeedAccuracy)
      return std::exp(-z) * (idx.k == 0 ? 1.0 : z) * s.s;
  }
  return std::exp(-0.5 * z) * whittaker_w(idx, z);
}

/// Tabulated W_{k,xi/2} on [z_min, inf): one inward march records every
/// accepted step, and lookups use quintic Hermite interpolation with w'' taken
/// from the equation. Above the seeding point the series is used directly.
class WhittakerProfile {
public:
  WhittakerProfile() = default;

  WhittakerProfile(const WhittakerIndex& idx, double z_min, double fault = 0.0)
      : idx_(idx), z_min_(z_min), fault_scale_(1.0 + fault) {
    idx.validate();
    detail::require_argument(z_min);
    if (z_min >= detail::kSeedFloor &&
        detail::asymptotic_series(idx, z_min).rel_err <= detail::kSeedAccuracy) {
      z_seed_ = z_min;
      return;
    }
    detail::SeriesValue s;
    z_seed_ = detail::seed_point(idx, z_min, s);
    const auto seed = detail::scaled_from_series(idx, z_seed_, s);
    damp_ = std::exp(-0.5 * z_seed_);
    std::vector<Node> nodes;
    numerics::march_linear_ode(
        numerics::WhittakerCoefficient{idx.k, idx.xi2}, z_seed_, z_min, seed.w, seed.dw,
        detail::march_tolerance(),
        [&nodes](double z, double w, double dw) { nodes.push_back({z, w, dw}); });
    std::reverse(nodes.begin(), nodes.end());
    nodes_ = std::move(nodes);
  }

  const WhittakerIndex& index() const { return idx_; }
  double z_min() const { return z_min_; }

  /// W(z) for z >= z_min.
  double value(double z) const {
    if (z >= z_seed_) {
      const auto s = detail::asymptotic_series(idx_, z);
      return fault_scale_ * std::exp(-0.5 * z) * (idx_.k == 0 ? 1.0 : z) * s.s;
    }
    return fault_scale_ * damp_ * interpolate(z);
  }

  /// e^{-z/2} W(z) for z >= z_min.
  double damped(double z) const {
    if (z >= z_seed_) {
      const auto s = detail::asymptotic_series(idx_, z);
      return fault_scale_ * std::exp(-z) * (idx_.k == 0 ? 1.0 : z) * s.s;
    }
    return fault_scale_ * std::exp(-0.5 * z) * damp_ * interpolate(z);
  }

private:
  struct Node {
    double z, w, dw;
  };

  double interpolate(double z) const {
    if (z <= nodes_.front().z) return nodes_.front().w;
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), z,
                               [](double v, const Node& n) { return v < n.z; });
    if (it == nodes_.end()) return nodes_.back().w;
    const Node& b = *it;
    const Node& a = *(it - 1);
    const numerics::WhittakerCoefficient coef{idx_.k, idx_.xi2};
    const double h = b.z - a.z;
    const double t = (z - a.z) / h;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
    const double h2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
    const double h3 = 0.5 * (t3 - 2 * t4 + t5);
    const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
    const double h5 = 10 * t3 - 15 * t4 + 6 * t5;
    return h0 * a.w + h1 * h * a.dw + h2 * h * h * coef(a.z) * a.w +
           h3 * h * h * coef(b.z) * b.w + h4 * h * b.dw + h5 * b.w;
  }

  WhittakerIndex idx_{};
  double z_min_ = 1.0;
  double z_seed_ = detail::kSeedFloor;
  double damp_ = 1.0;
  double fault_scale_ = 1.0;
  std::vector<Node> nodes_;
};

}  // namespace srp::specfun
