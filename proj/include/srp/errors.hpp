#pragma once

#include <stdexcept>
#include <string>

namespace srp {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Base for failures of an iterative numerical method.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NoSignChange : public NumericalError {
public:
  NoSignChange(const std::string& what, double lo, double hi, double f_lo,
               double f_hi)
      : NumericalError(what), lo(lo), hi(hi), f_lo(f_lo), f_hi(f_hi) {}
  double lo, hi, f_lo, f_hi;
};

class NonConvergence : public NumericalError {
public:
  using NumericalError::NumericalError;
};

// Adaptive quadrature ran out of subdivisions. The best estimate so far is
// attached so callers can decide whether it is good enough.
class SubdivisionLimit : public NumericalError {
public:
  SubdivisionLimit(const std::string& what, double partial, double error)
      : NumericalError(what), partial_result(partial), error_estimate(error) {}
  double partial_result;
  double error_estimate;
};

class StepUnderflow : public NumericalError {
public:
  StepUnderflow(const std::string& what, double z)
      : NumericalError(what), position(z) {}
  double position;
};

class AccuracyNotAchieved : public NumericalError {
public:
  using NumericalError::NumericalError;
};

// Raised by the Monte Carlo layer: bad configuration, too few survivors,
// particle-system extinction.
class SimulationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvariantViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace srp
