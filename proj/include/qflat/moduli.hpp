#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "qflat/exppoly.hpp"

namespace qflat {

/**
 * ModuliSolution: weights r_0..r_n > 0 and phases 0 < theta_1 < ... < theta_n < 2pi
 * with frequencies a_0 = 1, a_i = exp(i theta_i), subject to
 *
 *     sum r_i = 1,   sum a_i r_i = 0,   sum a_i^2 r_i = 0.
 *
 * The three constraints make the canonical section flat and unit-speed: the
 * first normalizes, the second is horizontality, the third conformality.
 */
struct ModuliSolution {
  int n = 0;
  std::vector<double> r;      // n+1 weights
  std::vector<double> theta;  // n phases (theta_0 = 0 implicit)

  std::vector<cplx> freqs() const {
    std::vector<cplx> a;
    a.reserve(r.size());
    a.emplace_back(1.0, 0.0);
    for (double t : theta) a.push_back(std::polar(1.0, t));
    return a;
  }
};

inline void validate(const ModuliSolution& ms) {
  if (ms.n < 2) throw std::invalid_argument("ModuliSolution: n must be >= 2");
  if (ms.r.size() != static_cast<std::size_t>(ms.n) + 1 ||
      ms.theta.size() != static_cast<std::size_t>(ms.n))
    throw std::invalid_argument("ModuliSolution: wrong r/theta sizes");
  for (double w : ms.r)
    if (!(w > 0.0)) throw std::invalid_argument("ModuliSolution: weights must be positive");
  double prev = 0.0;
  for (double t : ms.theta) {
    if (!(t > prev)) throw std::invalid_argument("ModuliSolution: phases must increase strictly from 0");
    prev = t;
  }
  if (!(prev < two_pi)) throw std::invalid_argument("ModuliSolution: phases must stay below 2pi");
}

/** Uniform weights on the (n+1)-th roots of unity; solves the constraints exactly. */
inline ModuliSolution clifford(int n) {
  if (n < 2) throw std::invalid_argument("clifford: n must be >= 2");
  ModuliSolution ms;
  ms.n = n;
  ms.r.assign(n + 1, 1.0 / (n + 1));
  ms.theta.resize(n);
  for (int k = 1; k <= n; ++k) ms.theta[k - 1] = two_pi * k / (n + 1);
  return ms;
}

/** (sum r - 1, sum a r, sum a^2 r). */
inline std::array<cplx, 3> residual_triple(const ModuliSolution& ms) {
  cplx s0(0.0), s1(0.0), s2(0.0);
  const std::vector<cplx> a = ms.freqs();
  for (std::size_t i = 0; i < ms.r.size(); ++i) {
    s0 += ms.r[i];
    s1 += a[i] * ms.r[i];
    s2 += a[i] * a[i] * ms.r[i];
  }
  return {s0 - 1.0, s1, s2};
}

inline double residual_max(const ModuliSolution& ms) {
  const auto t = residual_triple(ms);
  return std::max({std::abs(t[0]), std::abs(t[1]), std::abs(t[2])});
}

struct SolveOptions {
  double tol = tol::solve;
  int max_starts = 48;
  int max_iters = 150;
  double min_gap = 1e-6;  // minimal phase separation accepted
  // Pin selected phases: size-n vector, NaN entries stay free.  Pinned phases
  // are trusted as given; only the remaining unknowns are optimized.
  std::vector<double> pinned_theta;
};

namespace detail {

inline double softplus(double x) {
  return x > 30.0 ? x : std::log1p(std::exp(x));
}

/** Damped least squares with numerical Jacobian on max-residual convergence. */
inline bool levenberg(std::function<Eigen::VectorXd(const Eigen::VectorXd&)> f,
                      Eigen::VectorXd& x, double tol_max, int max_iters) {
  const double h = 1e-7;
  double lambda = 1e-3;
  Eigen::VectorXd fx = f(x);
  for (int it = 0; it < max_iters; ++it) {
    if (fx.lpNorm<Eigen::Infinity>() <= tol_max) return true;
    const int m = static_cast<int>(fx.size()), d = static_cast<int>(x.size());
    Eigen::MatrixXd J(m, d);
    for (int j = 0; j < d; ++j) {
      Eigen::VectorXd xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      J.col(j) = (f(xp) - f(xm)) / (2.0 * h);
    }
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * fx;
    bool stepped = false;
    for (int k = 0; k < 10; ++k) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal().array() += lambda;
      const Eigen::VectorXd delta = A.ldlt().solve(-g);
      const Eigen::VectorXd xn = x + delta;
      const Eigen::VectorXd fn = f(xn);
      if (fn.squaredNorm() < fx.squaredNorm()) {
        x = xn;
        fx = fn;
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!stepped) return fx.lpNorm<Eigen::Infinity>() <= tol_max;
  }
  return fx.lpNorm<Eigen::Infinity>() <= tol_max;
}

inline Eigen::VectorXd constraint_residual(const std::vector<double>& r,
                                           const std::vector<double>& theta) {
  ModuliSolution ms;
  ms.n = static_cast<int>(theta.size());
  ms.r = r;
  ms.theta = theta;
  const auto t = residual_triple(ms);
  Eigen::VectorXd F(5);
  F << t[0].real(), t[1].real(), t[1].imag(), t[2].real(), t[2].imag();
  return F;
}

}  // namespace detail

/**
 * Multi-start damped least squares for the moduli constraints.
 *
 * Unknowns are log-weights (positivity built in) and, for the free phases,
 * softplus gap variables normalized so that the cumulative phases stay
 * strictly increasing inside (0, 2pi).  Deterministic for fixed
 * (n, seed, options): starts are seeded from a splitmix64 stream and tried in
 * order; the first start that converges below options.tol with every phase
 * gap at least options.min_gap wins.
 */
inline ModuliSolution solve(int n, std::uint64_t seed, SolveOptions opt = {}) {
  if (n < 2) throw std::invalid_argument("solve: n must be >= 2");
  const bool pinned_mode = !opt.pinned_theta.empty();
  if (pinned_mode && opt.pinned_theta.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("solve: pinned_theta must have size n");

  std::vector<int> free_idx;
  if (pinned_mode) {
    for (int k = 0; k < n; ++k)
      if (std::isnan(opt.pinned_theta[k])) free_idx.push_back(k);
  }
  const int n_theta_params = pinned_mode ? static_cast<int>(free_idx.size()) : n + 1;
  const int dim = (n + 1) + n_theta_params;

  const auto unpack = [&](const Eigen::VectorXd& x) {
    std::vector<double> r(n + 1), theta(n);
    for (int i = 0; i <= n; ++i) r[i] = std::exp(std::clamp(x[i], -40.0, 4.0));
    if (pinned_mode) {
      theta = opt.pinned_theta;
      for (std::size_t k = 0; k < free_idx.size(); ++k)
        theta[free_idx[k]] = x[n + 1 + static_cast<int>(k)];
    } else {
      // n+1 positive gaps (the last is the wrap back to 2pi), normalized
      double total = 0.0;
      std::vector<double> s(n + 1);
      for (int k = 0; k <= n; ++k) {
        s[k] = detail::softplus(x[n + 1 + k]) + 1e-12;
        total += s[k];
      }
      double acc = 0.0;
      for (int k = 0; k < n; ++k) {
        acc += s[k];
        theta[k] = two_pi * acc / total;
      }
    }
    return std::make_pair(r, theta);
  };

  const auto objective = [&](const Eigen::VectorXd& x) {
    auto [r, theta] = unpack(x);
    return detail::constraint_residual(r, theta);
  };

  for (int start = 0; start < opt.max_starts; ++start) {
    SamplePoints rng(seed * 0x9e3779b97f4a7c15ULL + 0xda3e39cb94b95bdbULL * start + 1);
    Eigen::VectorXd x(dim);
    for (int i = 0; i <= n; ++i)
      x[i] = std::log(1.0 / (n + 1)) + 0.6 * (rng.unit() - 0.5);
    for (int k = 0; k < n_theta_params; ++k) {
      x[n + 1 + k] = pinned_mode
                         ? two_pi * (free_idx[k] + rng.unit()) / (n + 1.0)
                         : 2.0 * (rng.unit() - 0.5);
    }
    if (!detail::levenberg(objective, x, opt.tol, opt.max_iters)) continue;

    auto [r, theta] = unpack(x);
    ModuliSolution ms;
    ms.n = n;
    ms.r = std::move(r);
    ms.theta = std::move(theta);

    bool gaps_ok = ms.theta.front() >= opt.min_gap &&
                   two_pi - ms.theta.back() >= opt.min_gap;
    for (std::size_t k = 0; k + 1 < ms.theta.size(); ++k)
      gaps_ok = gaps_ok && (ms.theta[k + 1] - ms.theta[k] >= opt.min_gap);
    if (!gaps_ok) continue;
    if (residual_max(ms) > opt.tol) continue;
    validate(ms);
    return ms;
  }
  throw std::runtime_error("solve: no feasible moduli found for n=" +
                           std::to_string(n));
}

/**
 * Solve under the fully antipodal layout (n odd, m = (n-1)/2):
 * theta = (A_1..A_m, pi, pi+A_1, ..., pi+A_m) with 0 < A_1 < ... < A_m < pi,
 * so every frequency a_i has -a_i among the frequencies.  Used by the
 * classification branches that assume this pairing.
 */
inline ModuliSolution solve_antipodal(int n, std::uint64_t seed, SolveOptions opt = {}) {
  if (n < 3 || n % 2 == 0)
    throw std::invalid_argument("solve_antipodal: n must be odd and >= 3");
  const int m = (n - 1) / 2;
  const int dim = (n + 1) + (m + 1);

  const auto unpack = [&](const Eigen::VectorXd& x) {
    std::vector<double> r(n + 1), theta(n);
    for (int i = 0; i <= n; ++i) r[i] = std::exp(std::clamp(x[i], -40.0, 4.0));
    double total = 0.0;
    std::vector<double> s(m + 1);
    for (int k = 0; k <= m; ++k) {
      s[k] = detail::softplus(x[n + 1 + k]) + 1e-12;
      total += s[k];
    }
    double acc = 0.0;
    for (int k = 0; k < m; ++k) {
      acc += s[k];
      const double alpha = std::numbers::pi * acc / total;
      theta[k] = alpha;
      theta[m + 1 + k] = std::numbers::pi + alpha;
    }
    theta[m] = std::numbers::pi;
    return std::make_pair(r, theta);
  };

  const auto objective = [&](const Eigen::VectorXd& x) {
    auto [r, theta] = unpack(x);
    return detail::constraint_residual(r, theta);
  };

  for (int start = 0; start < opt.max_starts; ++start) {
    SamplePoints rng(seed * 0x9e3779b97f4a7c15ULL + 0xa0761d6478bd642fULL * start + 3);
    Eigen::VectorXd x(dim);
    for (int i = 0; i <= n; ++i)
      x[i] = std::log(1.0 / (n + 1)) + 0.6 * (rng.unit() - 0.5);
    for (int k = 0; k <= m; ++k) x[n + 1 + k] = 2.0 * (rng.unit() - 0.5);
    if (!detail::levenberg(objective, x, opt.tol, opt.max_iters)) continue;

    auto [r, theta] = unpack(x);
    ModuliSolution ms;
    ms.n = n;
    ms.r = std::move(r);
    ms.theta = std::move(theta);
    bool gaps_ok = ms.theta.front() >= opt.min_gap &&
                   two_pi - ms.theta.back() >= opt.min_gap;
    for (std::size_t k = 0; k + 1 < ms.theta.size(); ++k)
      gaps_ok = gaps_ok && (ms.theta[k + 1] - ms.theta[k] >= opt.min_gap);
    if (!gaps_ok) continue;
    if (residual_max(ms) > opt.tol) continue;
    validate(ms);
    return ms;
  }
  throw std::runtime_error("solve_antipodal: no feasible moduli found for n=" +
                           std::to_string(n));
}

}  // namespace qflat
