#pragma once

// Equivariant harmonic maps into the sphere, f = sin(theta), g = cos(theta):
//   J(theta) = 1/2 \int (theta'^2 + (N-1) sin^2(theta) / r^2) r^{N-1} dr,  theta(1) = pi/2.
// theta(0) is held at the seed value: 0 on the escaping branch, pi/2 on the
// equator branch.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "glvortex/descent.hpp"
#include "glvortex/error.hpp"
#include "glvortex/nonescaping.hpp"
#include "glvortex/radial_grid.hpp"
#include "glvortex/spectral.hpp"
#include "glvortex/tridiagonal.hpp"

namespace glv {

enum class HarmonicSeed { escaping_seed, equator_seed };

struct ThetaProfile {
  RadialGrid grid;
  std::vector<double> theta;
  bool escaping_flag = false;
  int iterations = 0;
  int reflections = 0;

  /// (f, g) = (sin theta, cos theta), written through pi/2 - theta so that
  /// theta = pi/2 gives exactly (1, 0).
  ProfilePair to_pair() const {
    std::vector<double> f(theta.size()), g(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double phi = std::numbers::pi / 2 - theta[i];
      f[i] = std::cos(phi);
      g[i] = std::sin(phi);
    }
    return ProfilePair(grid, std::move(f), std::move(g), std::nullopt);
  }
};

namespace detail {

inline double theta_energy(const RadialGrid& grid, std::span<const double> th) {
  const auto c = grid.cell_coefficients();
  const auto w = grid.weights();
  const auto r = grid.nodes();
  const int N = grid.dimension();
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < th.size(); ++i) {
    const double d = th[i + 1] - th[i];
    e += 0.5 * c[i] * d * d;
  }
  for (std::size_t i = 1; i < th.size(); ++i) {
    const double s = std::sin(th[i]);
    e += 0.5 * w[i] * (N - 1) * s * s / (r[i] * r[i]);
  }
  return e;
}

/// Gradient at nodes 1..J-1 (others zero).
inline void theta_gradient(const RadialGrid& grid, std::span<const double> th,
                           std::span<double> G) {
  const auto c = grid.cell_coefficients();
  const auto w = grid.weights();
  const auto r = grid.nodes();
  const int N = grid.dimension();
  const std::size_t J = grid.intervals();
  std::fill(G.begin(), G.end(), 0.0);
  for (std::size_t i = 1; i < J; ++i) {
    G[i] = c[i - 1] * (th[i] - th[i - 1]) - c[i] * (th[i + 1] - th[i]) +
           w[i] * (N - 1) * std::sin(th[i]) * std::sin(std::numbers::pi / 2 - th[i]) / (r[i] * r[i]);
  }
}

inline double theta_merit(const RadialGrid& grid, std::span<const double> th) {
  std::vector<double> G(th.size());
  theta_gradient(grid, th, G);
  double m = 0.0;
  for (std::size_t i = 1; i + 1 < th.size(); ++i) m = std::max(m, std::abs(G[i] / grid.w(i)));
  return m;
}

inline NewtonStats newton_theta(const RadialGrid& grid, const SolverOptions& opts,
                                std::vector<double>& th) {
  const std::size_t J = grid.intervals();
  const auto c = grid.cell_coefficients();
  const auto w = grid.weights();
  const auto r = grid.nodes();
  const int N = grid.dimension();
  const double floor = roundoff_floor(grid);
  NewtonStats st;
  std::vector<double> G(J + 1), d(J - 1), e(J - 2), step(J - 1), trial;
  st.residual = theta_merit(grid, th);
  for (st.iterations = 0; st.iterations < opts.max_iterations; ++st.iterations) {
    if (std::isnan(st.residual)) throw NumericalError("NaN in harmonic Newton iterate");
    if (st.residual <= opts.tolerance) {
      st.converged = true;
      return st;
    }
    theta_gradient(grid, th, G);
    for (std::size_t i = 1; i < J; ++i) {
      d[i - 1] = c[i - 1] + c[i] + w[i] * (N - 1) * std::cos(2.0 * th[i]) / (r[i] * r[i]);
      if (i + 1 < J) e[i - 1] = -c[i];
      step[i - 1] = -G[i];
    }
    if (!linalg::solve_symmetric_tridiagonal(d, e, step)) break;
    bool accepted = false;
    double t = 1.0;
    for (int k = 0; k < 40; ++k, t *= 0.5) {
      trial = th;
      for (std::size_t i = 1; i < J; ++i) trial[i] += t * step[i - 1];
      const double res = theta_merit(grid, trial);
      if (res < st.residual) {
        th.swap(trial);
        st.residual = res;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      st.converged = st.residual <= floor;
      return st;
    }
  }
  st.converged = st.residual <= opts.tolerance;
  return st;
}

/// Weighted RMS of g = cos(theta), normalized by the volume 1/N.
inline double escape_measure(const RadialGrid& grid, std::span<const double> th) {
  const auto w = grid.weights();
  double s = 0.0, m = 0.0;
  for (std::size_t i = 0; i < th.size(); ++i) {
    const double g = std::sin(std::numbers::pi / 2 - th[i]);
    s += w[i] * g * g;
    m += w[i];
  }
  return std::sqrt(s / m);
}

// 4th-order first and second derivatives; off-centred at nodes 1 and J-1.
inline double d1_4(std::span<const double> u, std::size_t i, double h) {
  const std::size_t J = u.size() - 1;
  if (i == 1) return (-3 * u[0] - 10 * u[1] + 18 * u[2] - 6 * u[3] + u[4]) / (12 * h);
  if (i == J - 1)
    return (3 * u[J] + 10 * u[J - 1] - 18 * u[J - 2] + 6 * u[J - 3] - u[J - 4]) / (12 * h);
  return (u[i - 2] - 8 * u[i - 1] + 8 * u[i + 1] - u[i + 2]) / (12 * h);
}

inline double d2_4(std::span<const double> u, std::size_t i, double h) {
  const std::size_t J = u.size() - 1;
  if (i == 1)
    return (10 * u[0] - 15 * u[1] - 4 * u[2] + 14 * u[3] - 6 * u[4] + u[5]) / (12 * h * h);
  if (i == J - 1)
    return (10 * u[J] - 15 * u[J - 1] - 4 * u[J - 2] + 14 * u[J - 3] - 6 * u[J - 4] + u[J - 5]) /
           (12 * h * h);
  return (-u[i - 2] + 16 * u[i - 1] - 30 * u[i] + 16 * u[i + 1] - u[i + 2]) / (12 * h * h);
}

}  // namespace detail

/// Discrete J(theta), same staggered form as the reduced energy.
inline double harmonic_energy(const ThetaProfile& p) {
  return detail::theta_energy(p.grid, p.theta);
}

inline ThetaProfile solve_harmonic_theta(int N, const RadialGrid& grid, HarmonicSeed init,
                                         const SolverOptions& opts = {}) {
  if (N < 2) throw SizingError("harmonic solve needs N >= 2");
  if (grid.dimension() != N) throw SizingError("grid dimension differs from N");
  const std::size_t J = grid.intervals();
  const double half_pi = std::numbers::pi / 2;
  ThetaProfile out{grid};
  out.theta.resize(J + 1);
  for (std::size_t i = 0; i <= J; ++i)
    out.theta[i] = init == HarmonicSeed::escaping_seed ? half_pi * grid.r(i) : half_pi;
  out.theta[J] = half_pi;

  const auto c = grid.cell_coefficients();
  const auto w = grid.weights();
  const auto r = grid.nodes();
  std::vector<double> pd(J - 1), pe(J - 2);
  for (std::size_t i = 1; i < J; ++i) {
    pd[i - 1] = c[i - 1] + c[i] + w[i] * (N - 1) / (r[i] * r[i]);
    if (i + 1 < J) pe[i - 1] = -c[i];
  }
  detail::DescentProblem prob;
  prob.energy = [&](const std::vector<double>& x) { return detail::theta_energy(grid, x); };
  prob.gradient = [&](const std::vector<double>& x, std::vector<double>& G) {
    detail::theta_gradient(grid, x, G);
  };
  prob.precondition = [&](std::vector<double>& v) {
    std::span<double> inner(v.data() + 1, J - 1);
    linalg::solve_symmetric_tridiagonal(pd, pe, inner);
    v[0] = v[J] = 0.0;
  };
  prob.project = [&](std::vector<double>& x) {
    int events = 0;
    for (std::size_t i = 1; i < J; ++i) {
      if (x[i] < 0.0) {
        x[i] = -x[i];
        ++events;
      }
      if (x[i] > half_pi) {
        x[i] = std::numbers::pi - x[i];
        ++events;
      }
    }
    return events;
  };

  double tol = opts.gradient_switch;
  bool done = false;
  for (int attempt = 0; attempt < 3 && !done; ++attempt, tol *= 1e-3) {
    auto ds = detail::bb_descent(prob, out.theta, tol, opts.max_descent_iterations);
    out.iterations += ds.iterations;
    out.reflections += ds.projections;
    std::vector<double> th = out.theta;
    NewtonStats ns = detail::newton_theta(grid, opts, th);
    out.iterations += ns.iterations;
    if (ns.converged) {
      out.theta = std::move(th);
      done = true;
    } else if (attempt == 2) {
      throw ConvergenceError("harmonic theta minimization", out.iterations, ns.residual);
    }
  }
  out.reflections += prob.project(out.theta);
  out.escaping_flag = detail::escape_measure(grid, out.theta) > opts.escape_threshold;
  return out;
}

/// (N-1) / (2 (N-2)), the energy of x -> (x/|x|, 0).
inline double equator_energy(int N) {
  if (N < 3) throw DivergentEnergy("equator map has infinite energy for N = 2");
  return (N - 1.0) / (2.0 * (N - 2.0));
}

/// Max interior residual of the sphere-constrained system
///   -f'' - (N-1)/r f' + (N-1)/r^2 f = Gamma f,  -g'' - (N-1)/r g' = Gamma g,
///   Gamma = f'^2 + (N-1) f^2 / r^2 + g'^2.
inline double harmonic_residual(int N, const ThetaProfile& theta) {
  const ProfilePair p = theta.to_pair();
  const std::size_t J = theta.grid.intervals();
  const double h = theta.grid.spacing();
  double res = 0.0;
  for (std::size_t i = 1; i < J; ++i) {
    const double r = theta.grid.r(i);
    const double f1 = detail::d1_4(p.f, i, h), f2 = detail::d2_4(p.f, i, h);
    const double g1 = detail::d1_4(p.g, i, h), g2 = detail::d2_4(p.g, i, h);
    const double gamma = f1 * f1 + (N - 1) * p.f[i] * p.f[i] / (r * r) + g1 * g1;
    const double rf = -f2 - (N - 1) * f1 / r + (N - 1) * p.f[i] / (r * r) - gamma * p.f[i];
    const double rg = -g2 - (N - 1) * g1 / r - gamma * p.g[i];
    res = std::max({res, std::abs(rf), std::abs(rg)});
  }
  return res;
}

/// Smallest Rayleigh quotient of Q(0, q) = \int q'^2 - (N-1) q^2 / r^2 over
/// discrete q vanishing at both ends.
inline double equator_instability_probe(int N, const RadialGrid& grid) {
  if (N < 2) throw SizingError("probe needs N >= 2");
  if (grid.dimension() != N) throw SizingError("grid dimension differs from N");
  std::vector<double> V(grid.size(), 0.0);
  for (std::size_t i = 1; i < V.size(); ++i) V[i] = -(N - 1) / (grid.r(i) * grid.r(i));
  auto sys = detail::make_sturm_liouville(grid, std::move(V),
                                          std::numeric_limits<double>::infinity(), true);
  return principal_eigenpair(sys).eigenvalue;
}

}  // namespace glv
