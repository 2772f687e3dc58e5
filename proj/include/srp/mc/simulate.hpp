#pragma once

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "srp/errors.hpp"
#include "srp/mc/parallel.hpp"
#include "srp/mc/philox.hpp"
#include "srp/qsd.hpp"

namespace srp::mc {

inline constexpr double kNever = std::numeric_limits<double>::infinity();

/// Initial value of the statistic: a fixed point or a draw from Q_A.
struct Headstart {
  bool quasi_stationary = false;
  double x = 0.0;

  static Headstart fixed(double x) { return {false, x}; }
  static Headstart stationary() { return {true, 0.0}; }
};

struct SimConfig {
  Model model;
  double A = 10.0;
  Headstart headstart;
  double theta = kNever;  // change-point; kNever = no change
  double step = 1e-3;
  std::uint64_t n_paths = 10000;
  std::uint64_t seed = 1;
  std::optional<double> t_max;  // unset: resolved_t_max()

  void validate() const {
    model.validate();
    std::ostringstream os;
    if (!(A > 0.0) || !std::isfinite(A)) os << "A must be positive; ";
    if (!headstart.quasi_stationary && !(headstart.x >= 0.0 && headstart.x <= A))
      os << "headstart must lie in [0, A]; ";
    if (!(theta >= 0.0)) os << "theta must be >= 0; ";
    if (!(step > 0.0) || !std::isfinite(step)) os << "step must be positive; ";
    if (n_paths < 100) os << "n_paths must be >= 100; ";
    if (t_max && !(*t_max >= 10.0 * A && std::isfinite(*t_max))) os << "t_max must be >= 10 A; ";
    if (!os.str().empty()) throw DomainError("SimConfig: " + os.str());
  }

  // Default cap: 50 A past the change-point. Since lambda_A >= 1/A this is at
  // least 50/lambda_A, the cap used for false-alarm runs.
  double resolved_t_max() const {
    if (t_max) return *t_max;
    return (std::isfinite(theta) ? theta : 0.0) + 50.0 * A;
  }
};

struct SimEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  double std_dev = 0.0;
  std::uint64_t n_effective = 0;
  std::uint64_t censored = 0;
  std::string warning;
  SimConfig config;  // with t_max resolved
};

namespace detail {

// Neumaier-compensated running sum; used in path-index order.
struct CompensatedSum {
  double sum = 0.0, comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

struct PathOutcome {
  double tau = 0.0;
  bool censored = false;
};

/// One path of the statistic via psi_{n+1} = R psi_n + h (R + 1) / 2 with
/// R = exp(mu dX - mu^2 h / 2): the likelihood-ratio representation with the
/// time integral taken trapezoidally. The boundary is checked at grid points.
/// X has drift mu on the part of each step lying after theta.
inline PathOutcome run_path(const Model& m, double A, double psi, double theta, double h,
                            std::uint64_t n_max, PhiloxStream& rng) {
  if (psi >= A) return {0.0, false};
  const double mu = m.mu, mu2 = m.mu2();
  const double scale = mu * std::sqrt(h);
  const double half_h = 0.5 * h;
  for (std::uint64_t n = 0; n < n_max; ++n) {
    const double t0 = static_cast<double>(n) * h;
    const double t1 = static_cast<double>(n + 1) * h;
    const double overlap = std::clamp(t1 - std::max(t0, theta), 0.0, h);
    const double R = std::exp(scale * rng.normal() + mu2 * (overlap - half_h));
    psi = R * psi + half_h * (R + 1.0);
    assert(psi >= 0.0);
    if (psi >= A) return {t1, false};
  }
  return {static_cast<double>(n_max) * h, true};
}

inline std::uint64_t step_count(double t_max, double h) {
  return static_cast<std::uint64_t>(std::ceil(t_max / h - 1e-9));
}

/// Runs every path; path i uses stream i, whose block 0 is reserved for the
/// headstart uniform.
inline std::vector<PathOutcome> run_paths(const SimConfig& cfg, std::uint64_t seed,
                                          const QsdEval* qsd) {
  const double t_max = cfg.resolved_t_max();
  const std::uint64_t n_max = step_count(t_max, cfg.step);
  std::vector<PathOutcome> out(cfg.n_paths);
  parallel_for(cfg.n_paths, [&](std::size_t i) {
    PhiloxStream headstart_rng(seed, i, 0);
    const double u = headstart_rng.uniform_pair()[0];
    const double x0 = cfg.headstart.quasi_stationary ? qsd_sample(*qsd, u) : cfg.headstart.x;
    PhiloxStream rng(seed, i, 1);
    out[i] = run_path(cfg.model, cfg.A, x0, cfg.theta, cfg.step, n_max, rng);
  });
  return out;
}

/// Mean of tau - theta over paths with tau > theta (all paths when theta is
/// infinite or zero). Censored paths enter at t_max.
inline SimEstimate summarize(const SimConfig& cfg, const std::vector<PathOutcome>& paths) {
  SimEstimate est;
  est.config = cfg;
  est.config.t_max = cfg.resolved_t_max();
  const bool change = std::isfinite(cfg.theta);
  const double shift = change ? cfg.theta : 0.0;
  auto kept = [&](const PathOutcome& p) { return !change || cfg.theta == 0.0 || p.tau > cfg.theta; };

  CompensatedSum sum;
  for (const auto& p : paths) {
    if (!kept(p)) continue;
    sum.add(p.tau - shift);
    ++est.n_effective;
    if (p.censored) ++est.censored;
  }
  if (est.n_effective < 100) {
    std::ostringstream os;
    os << "insufficient survivors: " << est.n_effective << " of " << paths.size()
       << " paths outlast theta=" << cfg.theta << " (need 100)";
    throw SimulationError(os.str());
  }
  const double n = static_cast<double>(est.n_effective);
  est.mean = sum.value() / n;
  CompensatedSum sq;
  for (const auto& p : paths) {
    if (!kept(p)) continue;
    const double d = p.tau - shift - est.mean;
    sq.add(d * d);
  }
  est.std_dev = std::sqrt(sq.value() / (n - 1.0));
  est.std_err = est.std_dev / std::sqrt(n);
  if (static_cast<double>(est.censored) > 0.01 * static_cast<double>(paths.size())) {
    std::ostringstream os;
    os << "excessive censoring: " << est.censored << " of " << paths.size()
       << " paths reached t_max=" << *est.config.t_max << "; mean is biased low";
    est.warning = os.str();
    std::clog << "warning: " << est.warning << "\n";
  }
  return est;
}

}  // namespace detail

/// Mean passage time of the statistic to A under P_theta. For finite theta
/// the estimate is the conditional delay E_theta(tau - theta | tau > theta).
inline SimEstimate simulate_gsr_passage(const SimConfig& cfg) {
  cfg.validate();
  std::optional<QsdEval> qsd;
  if (cfg.headstart.quasi_stationary) qsd.emplace(solve_lambda(cfg.model, cfg.A));
  const auto paths = detail::run_paths(cfg, cfg.seed, qsd ? &*qsd : nullptr);
  return detail::summarize(cfg, paths);
}

struct ExponentialityDiagnostics {
  double rate = 0.0;         // lambda_A
  double mean = 0.0;         // sample mean of the false-alarm time
  double cv = 0.0;           // std_dev / mean
  double ks_distance = 0.0;  // sup |F_n - Exp(lambda_A) cdf|
};

struct SrpSimulation {
  EigenPair eigen;
  std::vector<double> thetas;
  std::vector<SimEstimate> estimates;  // parallel to thetas
  std::optional<ExponentialityDiagnostics> exponentiality;  // when kNever is among thetas
};

/// Seed of the independent run for change-point theta.
inline std::uint64_t theta_seed(std::uint64_t seed, double theta) {
  return mix_seed(seed ^ mix_seed(std::bit_cast<std::uint64_t>(theta)));
}

/// Sup distance between the empirical cdf of a sorted sample and `cdf`.
template <class Cdf>
double sup_distance(const std::vector<double>& sorted, Cdf&& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double F = cdf(sorted[i]);
    d = std::max({d, std::fabs(static_cast<double>(i + 1) / n - F),
                  std::fabs(F - static_cast<double>(i) / n)});
  }
  return d;
}

/// SRP runs with a quasi-stationary headstart, one independent run per
/// change-point. cfg.theta is ignored.
inline SrpSimulation simulate_srp(const SimConfig& cfg, const std::vector<double>& thetas) {
  if (!cfg.headstart.quasi_stationary)
    throw DomainError("simulate_srp: headstart must be quasi-stationary");
  if (thetas.empty()) throw DomainError("simulate_srp: no change-points given");
  cfg.validate();
  SrpSimulation out;
  out.eigen = solve_lambda(cfg.model, cfg.A);
  out.thetas = thetas;
  const QsdEval qsd(out.eigen);
  for (double theta : thetas) {
    SimConfig run = cfg;
    run.theta = theta;
    run.validate();
    if (!cfg.t_max && !std::isfinite(theta))
      run.t_max = std::max(50.0 / out.eigen.lambda, 10.0 * cfg.A);
    const auto paths = detail::run_paths(run, theta_seed(cfg.seed, theta), &qsd);
    out.estimates.push_back(detail::summarize(run, paths));
    if (!std::isfinite(theta) && !out.exponentiality) {
      ExponentialityDiagnostics diag;
      diag.rate = out.eigen.lambda;
      diag.mean = out.estimates.back().mean;
      diag.cv = out.estimates.back().std_dev / diag.mean;
      std::vector<double> taus;
      taus.reserve(paths.size());
      for (const auto& p : paths) taus.push_back(p.tau);
      std::sort(taus.begin(), taus.end());
      diag.ks_distance =
          sup_distance(taus, [&](double t) { return 1.0 - std::exp(-diag.rate * t); });
      out.exponentiality = diag;
    }
  }
  return out;
}

struct EmpiricalQsd {
  std::vector<double> sorted;  // particle positions after burn-in
  double mean = 0.0;
  double std_err = 0.0;
  std::uint64_t resamples = 0;  // absorptions replaced during burn-in
  double burn_in = 0.0;
};

/// Fleming-Viot particle system under P_infinity: n_paths particles run for
/// 5 A; a particle reaching A jumps to the position of a uniformly chosen
/// particle that survived the same step.
inline EmpiricalQsd estimate_qsd_empirical(const SimConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n_paths;
  const Model& m = cfg.model;
  const double A = cfg.A, h = cfg.step;

  std::vector<double> pos(n);
  std::vector<PhiloxStream> rng;
  rng.reserve(n);
  std::optional<QsdEval> qsd;
  if (cfg.headstart.quasi_stationary) qsd.emplace(solve_lambda(m, A));
  for (std::size_t i = 0; i < n; ++i) {
    PhiloxStream headstart_rng(cfg.seed, i, 0);
    const double u = headstart_rng.uniform_pair()[0];
    pos[i] = qsd ? qsd_sample(*qsd, u) : cfg.headstart.x;
    if (pos[i] >= A) pos[i] = 0.0;
    rng.emplace_back(cfg.seed, i, 1);
  }
  PhiloxStream pick(mix_seed(cfg.seed ^ 0x46565F6272616E63ull), 0);

  EmpiricalQsd out;
  out.burn_in = 5.0 * A;
  const std::uint64_t steps = detail::step_count(out.burn_in, h);
  const double scale = m.mu * std::sqrt(h), drift = -0.5 * m.mu2() * h, half_h = 0.5 * h;
  std::vector<std::size_t> absorbed, alive;
  absorbed.reserve(n);
  alive.reserve(n);
  for (std::uint64_t s = 0; s < steps; ++s) {
    absorbed.clear();
    alive.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const double R = std::exp(scale * rng[i].normal() + drift);
      pos[i] = R * pos[i] + half_h * (R + 1.0);
      assert(pos[i] >= 0.0);
      (pos[i] >= A ? absorbed : alive).push_back(i);
    }
    if (alive.empty()) {
      std::ostringstream os;
      os << "estimate_qsd_empirical: all " << n << " particles absorbed in step " << s
         << " (h=" << h << ")";
      throw SimulationError(os.str());
    }
    for (std::size_t i : absorbed) {
      const auto k = static_cast<std::size_t>(pick.uniform() * static_cast<double>(alive.size()));
      pos[i] = pos[alive[std::min(k, alive.size() - 1)]];
    }
    out.resamples += absorbed.size();
  }

  detail::CompensatedSum sum;
  for (double x : pos) sum.add(x);
  out.mean = sum.value() / static_cast<double>(n);
  detail::CompensatedSum sq;
  for (double x : pos) sq.add((x - out.mean) * (x - out.mean));
  out.std_err = std::sqrt(sq.value() / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
  std::sort(pos.begin(), pos.end());
  out.sorted = std::move(pos);
  return out;
}

}  // namespace srp::mc
