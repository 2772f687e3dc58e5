#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "srp/errors.hpp"
#include "srp/numerics/quadrature.hpp"
#include "srp/qsd.hpp"

using namespace srp;

namespace {
double rel(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

numerics::Tolerance fine() {
  numerics::Tolerance t;
  t.rel = 1e-11;
  t.max_iter = 4000;
  return t;
}

template <class F>
double integrate_qsd(const QsdEval& q, F&& weight) {
  return numerics::integrate_adaptive([&](double x) { return weight(x) * q.pdf(x); }, 0.0,
                                      q.threshold(), fine());
}
}  // namespace

TEST(Eigenvalue, ReferenceValue) {
  // mpmath root of W_{1,xi/2}(2) = 0 in lambda at mu = 1, A = 10.
  const EigenPair e = solve_lambda({1.0}, 10.0);
  EXPECT_LE(rel(e.lambda, 0.12846121583707029169), 1e-12);
  EXPECT_DOUBLE_EQ(e.xi2, 1.0 - 8.0 * e.lambda);
  EXPECT_EQ(check_eigenpair(e), "");
}

TEST(Eigenvalue, InsideBracketAcrossGrid) {
  for (double mu : {0.3, -1.0, 1.7})
    for (double A : {0.5, 3.0, 30.0, 300.0}) {
      SCOPED_TRACE(testing::Message() << "mu=" << mu << " A=" << A);
      const EigenPair e = solve_lambda({mu}, A);
      const auto br = eigenvalue_bracket({mu}, A);
      EXPECT_GE(e.lambda, br.lo);
      EXPECT_LE(e.lambda, br.hi);
      EXPECT_EQ(check_eigenpair(e), "");
    }
}

TEST(Eigenvalue, SignOfDriftIrrelevant) {
  EXPECT_DOUBLE_EQ(solve_lambda({-0.5}, 20.0).lambda, solve_lambda({0.5}, 20.0).lambda);
}

TEST(Eigenvalue, DecreasesWithThreshold) {
  double prev = solve_lambda({1.0}, 1.0).lambda;
  for (double A : {2.0, 5.0, 10.0, 50.0, 200.0}) {
    const double l = solve_lambda({1.0}, A).lambda;
    EXPECT_LT(l, prev);
    prev = l;
  }
}

TEST(Eigenvalue, CheckDetectsWrongLambda) {
  EigenPair e = solve_lambda({1.0}, 10.0);
  e = EigenPair::make(e.model, e.A, e.lambda * (1 + 1e-4));
  EXPECT_NE(check_eigenpair(e), "");
  EigenPair out = EigenPair::make(e.model, e.A, 0.5 / e.A);
  EXPECT_NE(check_eigenpair(out).find("below"), std::string::npos);
}

TEST(Eigenvalue, DomainErrors) {
  EXPECT_THROW(solve_lambda({0.0}, 10.0), DomainError);
  EXPECT_THROW(solve_lambda({1.0}, 0.0), DomainError);
  EXPECT_THROW(solve_lambda({1.0}, -3.0), DomainError);
  EXPECT_THROW(solve_lambda({std::nan("")}, 10.0), DomainError);
}

TEST(Qsd, MomentsMatchClosedForms) {
  const QsdEval q(solve_lambda({1.0}, 10.0));
  const double mass = integrate_qsd(q, [](double) { return 1.0; });
  const double m1 = integrate_qsd(q, [](double x) { return x; });
  const double m2 = integrate_qsd(q, [](double x) { return x * x; });
  EXPECT_NEAR(mass, 1.0, 1e-10);
  EXPECT_LE(rel(m1, qsd_mean(q.eigen())), 1e-9);
  EXPECT_LE(rel(m2 - m1 * m1, qsd_var(q.eigen())), 1e-8);
  EXPECT_LE(rel(qsd_mean(q.eigen()), 2.2155493120326816776), 1e-11);
  EXPECT_LE(rel(qsd_var(q.eigen()), 2.5484189386035952128), 1e-10);
}

TEST(Qsd, CdfIsMonotoneWithCorrectEnds) {
  const QsdEval q(solve_lambda({0.5}, 25.0));
  EXPECT_EQ(qsd_cdf(q, 0.0), 0.0);
  EXPECT_EQ(qsd_cdf(q, -1.0), 0.0);
  EXPECT_EQ(qsd_cdf(q, 25.0), 1.0);
  EXPECT_NEAR(qsd_cdf(q, 25.0 * (1 - 1e-12)), 1.0, 1e-9);
  double prev = 0.0;
  for (int i = 1; i <= 500; ++i) {
    const double c = qsd_cdf(q, 25.0 * i / 500);
    EXPECT_GE(c, prev);
    prev = c;
  }
}

TEST(Qsd, PdfIsDerivativeOfCdf) {
  const QsdEval q(solve_lambda({1.0}, 5.0));
  for (double x : {0.3, 1.0, 2.5, 4.0, 4.9}) {
    const double h = 1e-5;
    const double fd = (qsd_cdf(q, x + h) - qsd_cdf(q, x - h)) / (2 * h);
    EXPECT_NEAR(qsd_pdf(q, x), fd, 1e-7);
  }
}

TEST(Qsd, PdfVanishesAtThresholdAndOutside) {
  const QsdEval q(solve_lambda({1.0}, 10.0));
  EXPECT_EQ(qsd_pdf(q, 10.0), 0.0);
  EXPECT_EQ(qsd_pdf(q, 11.0), 0.0);
  EXPECT_EQ(qsd_pdf(q, 0.0), 0.0);
  EXPECT_NEAR(qsd_pdf(q, 10.0 * (1 - 1e-10)), 0.0, 1e-8);
  EXPECT_GT(qsd_pdf(q, 2.0), 0.0);
}

TEST(Qsd, SampleInvertsCdf) {
  const QsdEval q(solve_lambda({1.0}, 10.0));
  for (double u : {1e-6, 0.01, 0.3, 0.5, 0.9, 0.999999}) {
    const double x = qsd_sample(q, u);
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 10.0);
    EXPECT_NEAR(qsd_cdf(q, x), u, 1e-9);
  }
  EXPECT_EQ(qsd_sample(q, 0.0), 0.0);
  EXPECT_EQ(qsd_sample(q, 1.0), 10.0);
}

TEST(Qsd, NormalizerPositive) {
  for (double A : {0.2, 1.0, 100.0, 1000.0}) {
    const QsdEval q(solve_lambda({1.0}, A));
    EXPECT_GT(q.normalizer(), 0.0);
  }
}

TEST(Qsd, MeanBelowThresholdAndVariancePositive) {
  for (double mu : {0.25, 0.5, 1.0, 2.0})
    for (double A : {1.0, 10.0, 100.0}) {
      const EigenPair e = solve_lambda({mu}, A);
      EXPECT_GT(qsd_mean(e), 0.0);
      EXPECT_LT(qsd_mean(e), A);
      EXPECT_GT(qsd_var(e), 0.0);
    }
}
