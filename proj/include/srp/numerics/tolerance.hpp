#pragma once

#include <cmath>
#include <string>

#include "srp/errors.hpp"

namespace srp::numerics {

/// Stopping rule shared by the root finder, the quadrature and the ODE
/// marcher. `max_iter` doubles as the subdivision / step budget.
struct Tolerance {
  double rel = 1e-12;
  double abs = 0.0;
  int max_iter = 200;

  void validate() const {
    if (!(rel >= 1e-14) || !std::isfinite(rel))
      throw DomainError("Tolerance: rel must be >= 1e-14, got " +
                        std::to_string(rel));
    if (!(abs >= 0.0) || !std::isfinite(abs))
      throw DomainError("Tolerance: abs must be >= 0");
    if (max_iter <= 0) throw DomainError("Tolerance: max_iter must be positive");
  }

  // Width of the acceptance band around `value`.
  double band(double value) const { return std::max(abs, rel * std::fabs(value)); }
};

}  // namespace srp::numerics
