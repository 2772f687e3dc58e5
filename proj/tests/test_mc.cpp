#include <cmath>
#include <cstdlib>
#include <vector>

#include <gtest/gtest.h>

#include "srp/errors.hpp"
#include "srp/mc/parallel.hpp"
#include "srp/mc/philox.hpp"
#include "srp/mc/simulate.hpp"
#include "srp/qsd.hpp"
#include "srp/risk.hpp"

using namespace srp;
using namespace srp::mc;

namespace {
SimConfig small_config(double A = 2.0, double x = 0.0) {
  SimConfig c;
  c.model = Model{1.0};
  c.A = A;
  c.headstart = Headstart::fixed(x);
  c.step = 1e-3;
  c.n_paths = 2000;
  c.seed = 314159;
  return c;
}

class ThreadEnv {
public:
  explicit ThreadEnv(const char* v) { setenv("QCD_SRP_THREADS", v, 1); }
  ~ThreadEnv() { unsetenv("QCD_SRP_THREADS"); }
};
}  // namespace

// Known-answer vectors from the Random123 distribution.
TEST(Philox, KnownAnswers) {
  using A4 = std::array<std::uint32_t, 4>;
  EXPECT_EQ(PhiloxStream::philox({0, 0, 0, 0}, {0, 0}),
            (A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(PhiloxStream::philox({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                 {0xffffffff, 0xffffffff}),
            (A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(PhiloxStream::philox({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                 {0xa4093822, 0x299f31d0}),
            (A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, StreamsAreReproducibleAndDistinct) {
  PhiloxStream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  for (int i = 0; i < 10; ++i) {
    const double va = a.normal();
    EXPECT_EQ(va, b.normal());
    EXPECT_NE(va, c.normal());
    EXPECT_NE(va, d.normal());
  }
}

TEST(Philox, StartBlockSkipsAhead) {
  PhiloxStream a(11, 2, 0), b(11, 2, 5);
  for (int i = 0; i < 5; ++i) a.next_block();
  EXPECT_EQ(a.next_block(), b.next_block());
}

TEST(Philox, UniformAndNormalMoments) {
  PhiloxStream s(2024, 0);
  const int n = 200000;
  double su = 0, sz = 0, szz = 0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = s.normal();
    sz += z;
    szz += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(sz / n, 0.0, 5 / std::sqrt(n));
  EXPECT_NEAR(szz / n, 1.0, 5 * std::sqrt(2.0 / n));
}

TEST(Parallel, CoversEveryIndexOnceAndRethrows) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; }, 4);
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(100, [](std::size_t i) { if (i == 57) throw SimulationError("x"); }, 3),
               SimulationError);
}

TEST(Parallel, ThreadCountFromEnvironment) {
  ThreadEnv env("3");
  EXPECT_EQ(thread_count(), 3u);
}

TEST(SimConfig, Validation) {
  auto c = small_config();
  c.n_paths = 99;
  EXPECT_THROW(c.validate(), DomainError);
  c = small_config();
  c.t_max = 5.0 * c.A;
  EXPECT_THROW(c.validate(), DomainError);
  c = small_config();
  c.headstart = Headstart::fixed(3.0);
  EXPECT_THROW(c.validate(), DomainError);
  c = small_config();
  c.step = 0.0;
  EXPECT_THROW(c.validate(), DomainError);
  c = small_config();
  c.theta = -1.0;
  EXPECT_THROW(c.validate(), DomainError);
  c = small_config();
  c.model.mu = 0.0;
  EXPECT_THROW(c.validate(), DomainError);
  EXPECT_NO_THROW(small_config().validate());
}

TEST(SimConfig, DefaultCap) {
  auto c = small_config();
  EXPECT_EQ(c.resolved_t_max(), 100.0);
  c.theta = 3.0;
  EXPECT_EQ(c.resolved_t_max(), 103.0);
  c.t_max = 40.0;
  EXPECT_EQ(c.resolved_t_max(), 40.0);
}

TEST(Path, StatisticStaysPositiveUnderHeavyNoise) {
  PhiloxStream rng(1, 0);
  const auto out = mc::detail::run_path(Model{8.0}, 1e6, 0.0, kNever, 0.05, 20000, rng);
  EXPECT_TRUE(std::isfinite(out.tau));
}

TEST(Path, HeadstartAtThresholdStopsImmediately) {
  PhiloxStream rng(1, 0);
  EXPECT_EQ(mc::detail::run_path(Model{1.0}, 2.0, 2.0, kNever, 1e-3, 10, rng).tau, 0.0);
}

TEST(Path, CensoredAtCap) {
  PhiloxStream rng(1, 0);
  const auto out = mc::detail::run_path(Model{1.0}, 1e9, 0.0, kNever, 1e-2, 100, rng);
  EXPECT_TRUE(out.censored);
  EXPECT_DOUBLE_EQ(out.tau, 1.0);
}

TEST(Summary, CensoredPathsAreCountedAndFlagged) {
  auto c = small_config();
  std::vector<mc::detail::PathOutcome> paths(200, {1.0, false});
  for (int i = 0; i < 5; ++i) paths[i] = {c.resolved_t_max(), true};
  const auto est = mc::detail::summarize(c, paths);
  EXPECT_EQ(est.n_effective, 200u);
  EXPECT_EQ(est.censored, 5u);
  EXPECT_FALSE(est.warning.empty());
  EXPECT_NEAR(est.std_err, est.std_dev / std::sqrt(200.0), 1e-15);
}

TEST(Summary, ConditioningOnChangePoint) {
  auto c = small_config();
  c.theta = 1.0;
  std::vector<mc::detail::PathOutcome> paths;
  for (int i = 0; i < 150; ++i) paths.push_back({0.5, false});  // before the change
  for (int i = 0; i < 30; ++i) paths.push_back({1.0, false});  // tau = theta: pre-change stop
  for (int i = 0; i < 150; ++i) paths.push_back({1.01 + 0.01 * (i % 2), false});
  const auto est = mc::detail::summarize(c, paths);
  EXPECT_EQ(est.n_effective, 150u);
  EXPECT_NEAR(est.mean, 0.015, 1e-12);
  for (auto& p : paths) p.tau = 0.5;
  EXPECT_THROW(mc::detail::summarize(c, paths), SimulationError);
}

TEST(Simulate, FalseAlarmMeanMatchesArl) {
  for (double x : {0.0, 1.0}) {
    const auto est = simulate_gsr_passage(small_config(2.0, x));
    EXPECT_EQ(est.censored, 0u);
    EXPECT_LT(std::fabs(est.mean - arl_gsr(2.0, x)), 3.0 * est.std_err)
        << "mean " << est.mean << " se " << est.std_err;
  }
}

TEST(Simulate, PostChangeDelayMatchesFormula) {
  auto c = small_config(3.0, 0.0);
  c.theta = 0.0;
  const auto est = simulate_gsr_passage(c);
  EXPECT_LT(std::fabs(est.mean - add0_gsr(c.model, 3.0, 0.0)), 3.0 * est.std_err);
}

TEST(Simulate, BitIdenticalAcrossThreadCounts) {
  SimEstimate one, four;
  {
    ThreadEnv env("1");
    one = simulate_gsr_passage(small_config());
  }
  {
    ThreadEnv env("4");
    four = simulate_gsr_passage(small_config());
  }
  EXPECT_EQ(one.mean, four.mean);
  EXPECT_EQ(one.std_err, four.std_err);
}

TEST(Simulate, SeedChangesResult) {
  auto c = small_config();
  const double a = simulate_gsr_passage(c).mean;
  c.seed += 1;
  EXPECT_NE(a, simulate_gsr_passage(c).mean);
}

TEST(Simulate, HalvingStepDoesNotRaiseMean) {
  auto c = small_config(2.0, 0.0);
  c.step = 4e-3;
  const auto coarse = simulate_gsr_passage(c);
  c.step = 2e-3;
  const auto finer = simulate_gsr_passage(c);
  EXPECT_LE(finer.mean, coarse.mean + 2.0 * std::hypot(coarse.std_err, finer.std_err));
}

TEST(Simulate, InsufficientSurvivors) {
  auto c = small_config(1.0, 0.0);
  c.theta = 200.0;
  c.t_max = 300.0;
  EXPECT_THROW(simulate_gsr_passage(c), SimulationError);
}

TEST(Srp, RequiresStationaryHeadstart) {
  EXPECT_THROW(simulate_srp(small_config(), {kNever}), DomainError);
  auto c = small_config();
  c.headstart = Headstart::stationary();
  EXPECT_THROW(simulate_srp(c, {}), DomainError);
}

TEST(Srp, ExponentialFalseAlarmsAndEqualDelays) {
  auto c = small_config(3.0);
  c.headstart = Headstart::stationary();
  const auto r = simulate_srp(c, {kNever, 0.0, 1.0});
  ASSERT_EQ(r.estimates.size(), 3u);
  ASSERT_TRUE(r.exponentiality);
  const auto& fa = r.estimates[0];
  EXPECT_LT(std::fabs(fa.mean - 1.0 / r.eigen.lambda), 3.0 * fa.std_err);
  EXPECT_NEAR(r.exponentiality->cv, 1.0, 0.1);
  EXPECT_LT(r.exponentiality->ks_distance, 0.05);
  const auto& d0 = r.estimates[1];
  const auto& d1 = r.estimates[2];
  EXPECT_LT(d1.n_effective, d0.n_effective);
  EXPECT_LT(std::fabs(d0.mean - d1.mean), 3.0 * std::hypot(d0.std_err, d1.std_err));
  EXPECT_LT(std::fabs(d0.mean - srp_delay(r.eigen)), 3.0 * d0.std_err);
}

TEST(Srp, ThetaRunsUseIndependentStreams) {
  EXPECT_NE(theta_seed(1, 0.0), theta_seed(1, 1.0));
  EXPECT_NE(theta_seed(1, kNever), theta_seed(2, kNever));
}

TEST(FlemingViot, PositionsAndLaw) {
  auto c = small_config(3.0);
  c.n_paths = 1000;
  c.step = 2e-3;
  const auto q = estimate_qsd_empirical(c);
  ASSERT_EQ(q.sorted.size(), 1000u);
  EXPECT_TRUE(std::is_sorted(q.sorted.begin(), q.sorted.end()));
  EXPECT_GE(q.sorted.front(), 0.0);
  EXPECT_LT(q.sorted.back(), 3.0);
  EXPECT_GT(q.resamples, 0u);
  const QsdEval exact(solve_lambda(c.model, 3.0));
  EXPECT_LT(sup_distance(q.sorted, [&](double x) { return exact.cdf(x); }), 0.06);
  EXPECT_LT(std::fabs(q.mean - qsd_mean(exact.eigen())), 4.0 * q.std_err);
}

TEST(FlemingViot, ExtinctionWhenStepIsHuge) {
  auto c = small_config(1.0);
  c.step = 5.0;
  EXPECT_THROW(estimate_qsd_empirical(c), SimulationError);
}

TEST(SupDistance, Basic) {
  const std::vector<double> s = {0.5};
  EXPECT_DOUBLE_EQ(sup_distance(s, [](double x) { return x; }), 0.5);
  const std::vector<double> grid = {0.25, 0.5, 0.75, 1.0};
  EXPECT_DOUBLE_EQ(sup_distance(grid, [](double x) { return x; }), 0.25);
}

TEST(CompensatedSum, RecoversSmallTerms) {
  mc::detail::CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-16);
  s.add(-1.0);
  EXPECT_NEAR(s.value(), 1e-13, 1e-20);
}
