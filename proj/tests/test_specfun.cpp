#include <cmath>
#include <tuple>
#include <vector>

#include <boost/math/special_functions/expint.hpp>
#include <gtest/gtest.h>

#include "srp/errors.hpp"
#include "srp/specfun/expint.hpp"
#include "srp/specfun/whittaker.hpp"

using namespace srp;
using namespace srp::specfun;

namespace {
double rel(double got, double want) { return std::fabs(got - want) / std::fabs(want); }
}  // namespace

// Reference values computed with mpmath at 30 digits.
TEST(ExpInt, ReferenceValues) {
  EXPECT_LE(rel(exp_int_e1(1.0), 0.219383934395520273677), 1e-14);
  EXPECT_LE(rel(exp_int_e1(0.5), 0.559773594776160811747), 1e-14);
  EXPECT_LE(rel(f_func(1.0), 0.596347362323194074341), 1e-14);
  EXPECT_LE(rel(f_func(0.2), 1.49334874693223957294), 1e-14);
}

TEST(ExpInt, AgreesWithBoost) {
  for (double x : {1e-8, 1e-3, 0.1, 0.7, 1.49, 1.5, 1.51, 3.0, 10.0, 40.0, 300.0}) {
    SCOPED_TRACE(x);
    EXPECT_LE(rel(exp_int_e1(x), boost::math::expint(1, x)), 2e-14);
  }
}

TEST(ExpInt, FFunctionLargeArgument) {
  // F(x) ~ 1/x - 1/x^2 + 2/x^3 - 6/x^4 + 24/x^5
  const double x = 1e4;
  EXPECT_LE(rel(f_func(x), 1 / x - 1 / (x * x) + 2 / (x * x * x) - 6 / (x * x * x * x) + 24 / (x * x * x * x * x)),
            1e-15);
  EXPECT_TRUE(std::isfinite(f_func(1e300)));
}

TEST(ExpInt, FFunctionDecreasing) {
  double prev = f_func(1e-6);
  for (double x = 1e-3; x < 100.0; x *= 1.3) {
    const double v = f_func(x);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(ExpInt, DomainErrors) {
  EXPECT_THROW(exp_int_e1(0.0), DomainError);
  EXPECT_THROW(exp_int_e1(-1.0), DomainError);
  EXPECT_THROW(f_func(std::nan("")), DomainError);
  EXPECT_THROW(f_func(-2.0), DomainError);
}

TEST(Whittaker, ClosedFormsAtXiOne) {
  for (double z : {0.01, 0.1, 1.0, 2.0, 10.0, 40.0, 100.0}) {
    SCOPED_TRACE(z);
    EXPECT_LE(rel(whittaker_w({0, 1.0}, z), std::exp(-0.5 * z)), 1e-10);
    EXPECT_LE(rel(whittaker_w({1, 1.0}, z), z * std::exp(-0.5 * z)), 1e-10);
  }
}

TEST(Whittaker, BesselKOracle) {
  // W_{0,nu}(z) = sqrt(z/pi) K_nu(z/2)
  for (double nu : {0.0, 0.1, 0.25, 0.45}) {
    for (double z : {0.05, 0.5, 2.0, 7.0, 30.0}) {
      SCOPED_TRACE(testing::Message() << "nu=" << nu << " z=" << z);
      const double want = std::sqrt(z / M_PI) * std::cyl_bessel_k(nu, 0.5 * z);
      EXPECT_LE(rel(whittaker_w({0, 4 * nu * nu}, z), want), 1e-11);
    }
  }
}

TEST(Whittaker, ValueAtTwoForZeroIndices) {
  EXPECT_NEAR(whittaker_w({0, 0.0}, 2.0), 0.3359288989929607, 1e-12);
}

// mpmath.whitw(k, sqrt(xi2)/2, z); imaginary second index for xi2 < 0.
TEST(Whittaker, ReferenceValues) {
  const std::vector<std::tuple<int, double, double, double>> cases = {
      {0, 0.5, 1.0, 0.56270314472786166},     {1, 0.5, 1.0, 0.53387862845860975},
      {0, -2.0, 0.3, 0.30616062537054072},    {1, -2.0, 0.3, -0.10290183304503134},
      {0, 0.9, 0.01, 0.89747840947898097},    {1, 0.9, 0.01, -0.013008670631431748},
      {0, -10.0, 5.0, 0.050907699382466605},  {1, -10.0, 5.0, 0.23270953012656422},
      {0, 0.99, 1e-3, 0.98376394737722557},   {1, 0.99, 1e-3, -0.0014659479574363326},
  };
  for (const auto& [k, xi2, z, want] : cases) {
    SCOPED_TRACE(testing::Message() << "k=" << k << " xi2=" << xi2 << " z=" << z);
    EXPECT_LE(rel(whittaker_w({k, xi2}, z), want), 1e-10);
  }
}

TEST(Whittaker, DerivativeMatchesFiniteDifference) {
  for (int k : {0, 1}) {
    const WhittakerIndex idx{k, 0.3};
    const double z = 0.7, h = 1e-5;
    const double fd = (whittaker_w(idx, z + h) - whittaker_w(idx, z - h)) / (2 * h);
    EXPECT_NEAR(whittaker_w_with_derivative(idx, z).dw, fd, 1e-8);
  }
}

TEST(Whittaker, DampedIsScaledValue) {
  const WhittakerIndex idx{1, -3.0};
  for (double z : {0.2, 3.0, 60.0})
    EXPECT_LE(rel(whittaker_w_damped(idx, z), std::exp(-0.5 * z) * whittaker_w(idx, z)), 1e-12);
}

TEST(Whittaker, ProfileMatchesPointwise) {
  for (int k : {0, 1}) {
    const WhittakerIndex idx{k, -1.5};
    const WhittakerProfile p(idx, 0.02);
    for (double z : {0.02, 0.0333, 0.5, 1.234, 9.9, 39.0, 45.0, 200.0}) {
      SCOPED_TRACE(testing::Message() << "k=" << k << " z=" << z);
      const double want = whittaker_w(idx, z);
      EXPECT_NEAR(p.value(z), want, 1e-10 * std::max(std::fabs(want), 1e-300) + 1e-300);
      EXPECT_NEAR(p.damped(z), std::exp(-0.5 * z) * want, 1e-10 * std::exp(-0.5 * z) * std::fabs(want) + 1e-300);
    }
  }
}

TEST(Whittaker, ProfileFaultScalesValues) {
  const WhittakerIndex idx{1, 0.2};
  const WhittakerProfile clean(idx, 0.1), faulty(idx, 0.1, 1e-3);
  for (double z : {0.1, 1.0, 50.0}) EXPECT_NEAR(faulty.value(z) / clean.value(z), 1.001, 1e-12);
}

TEST(Whittaker, ArgumentAndIndexErrors) {
  EXPECT_THROW(whittaker_w({0, 1.0}, 0.0), DomainError);
  EXPECT_THROW(whittaker_w({0, 1.0}, -1.0), DomainError);
  EXPECT_THROW(whittaker_w({2, 1.0}, 1.0), DomainError);
  EXPECT_THROW(whittaker_w({0, std::nan("")}, 1.0), DomainError);
}
