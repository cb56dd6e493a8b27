#pragma once

// Non-escaping radial profile f_eps:
//   -f'' - (N-1)/r f' + (N-1)/r^2 f = f W'(1 - f^2) / eps^2,  f(0) = 0, f(1) = 1,
// and evaluation of the reduced energy I_eps for any profile pair.

#include <cfloat>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "glvortex/error.hpp"
#include "glvortex/potential.hpp"
#include "glvortex/radial_energy.hpp"
#include "glvortex/radial_grid.hpp"
#include "glvortex/tridiagonal.hpp"

namespace glv {

struct SolverOptions {
  double tolerance = 1e-10;  // max-norm of the ODE residual
  int max_iterations = 100;  // Newton iterations per solve
  int max_descent_iterations = 20000;
  double gradient_switch = 1e-4;  // descent -> Newton hand-off (dual gradient norm)
  double escape_threshold = 1e-3;
  std::uint64_t seed = 20240611;
};

struct NewtonStats {
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

namespace detail {

/// Residual below which further Newton progress is limited by rounding in the
/// 1/h^2 stencil.
inline double roundoff_floor(const RadialGrid& grid) {
  const double h = grid.spacing();
  return 16.0 * DBL_EPSILON * 2.0 / (h * h);
}

inline double nonescaping_residual(const Potential& W, const RadialGrid& grid,
                                   const std::vector<double>& f, double eps,
                                   std::vector<double>& rf) {
  std::vector<double> g(f.size(), 0.0), rg;
  ode_residual(W, grid, f, g, eps, rf, rg);
  return max_abs(rf);
}

inline bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

/// Damped Newton from the given initial guess; f[0] = 0 and f[J] = 1 are kept.
inline NewtonStats newton_nonescaping(const Potential& W, const RadialGrid& grid, double eps,
                                      const SolverOptions& opts, std::vector<double>& f) {
  const std::size_t J = grid.intervals();
  const auto c = grid.cell_coefficients();
  const auto w = grid.weights();
  const auto r = grid.nodes();
  const int N = grid.dimension();
  const double inv_eps2 = 1.0 / (eps * eps);
  const double floor = roundoff_floor(grid);
  f[0] = 0.0;
  f[J] = 1.0;
  std::vector<double> rf;
  NewtonStats st;
  st.residual = nonescaping_residual(W, grid, f, eps, rf);
  std::vector<double> d(J - 1), e(J - 2), step(J - 1), trial;
  for (st.iterations = 0; st.iterations < opts.max_iterations; ++st.iterations) {
    if (!std::isfinite(st.residual)) throw NumericalError("NaN in non-escaping Newton iterate");
    if (st.residual <= opts.tolerance) {
      st.converged = true;
      return st;
    }
    for (std::size_t i = 1; i < J; ++i) {
      const PotentialValue p = W(1.0 - f[i] * f[i]);
      d[i - 1] = c[i - 1] + c[i] +
                 w[i] * ((N - 1) / (r[i] * r[i]) + inv_eps2 * (-p.Wp + 2.0 * f[i] * f[i] * p.Wpp));
      step[i - 1] = -rf[i] * w[i];
      if (i + 1 < J) e[i - 1] = -c[i];
    }
    if (!linalg::solve_symmetric_tridiagonal(d, e, step)) break;
    double t = 1.0;
    double best = st.residual;
    bool accepted = false;
    for (int k = 0; k < 40; ++k, t *= 0.5) {
      trial = f;
      for (std::size_t i = 1; i < J; ++i) trial[i] += t * step[i - 1];
      std::vector<double> rt;
      double res;
      try {
        res = nonescaping_residual(W, grid, trial, eps, rt);
      } catch (const DomainError&) {
        continue;
      }
      if (std::isfinite(res) && res < best) {
        f.swap(trial);
        rf.swap(rt);
        st.residual = res;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No decrease possible: accept only if we are at the rounding floor.
      st.converged = st.residual <= floor;
      return st;
    }
    if (max_abs(step) * t <= 4.0 * DBL_EPSILON && st.residual <= floor) {
      st.converged = true;
      return st;
    }
  }
  st.converged = st.residual <= opts.tolerance;
  return st;
}

inline bool monotone_and_bounded(const std::vector<double>& f) {
  const std::size_t J = f.size() - 1;
  for (std::size_t i = 1; i < J; ++i) {
    if (!(f[i] > 0.0 && f[i] < 1.0)) return false;
    if (f[i] < f[i - 1]) return false;
  }
  return f[J] >= f[J - 1];
}

}  // namespace detail

/// Solves for f_eps by damped Newton from f = r, falling back to continuation
/// from larger epsilon (halving per step) if the direct solve stalls or leaves
/// the monotone branch. `initial` overrides the f = r start.
inline ProfilePair solve_nonescaping_profile(const Potential& W, const RadialGrid& grid,
                                             double eps, const SolverOptions& opts = {},
                                             const std::vector<double>* initial = nullptr) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("epsilon must be positive");
  std::vector<double> f = initial ? *initial : std::vector<double>(grid.nodes().begin(),
                                                                   grid.nodes().end());
  check_length(grid, f.size());
  NewtonStats st = detail::newton_nonescaping(W, grid, eps, opts, f);
  if (st.converged && detail::monotone_and_bounded(f))
    return ProfilePair::nonescaping(grid, std::move(f), eps);

  // continuation: start where f = r is a good guess, halve toward eps
  double e = eps;
  while (e < 1.0) e *= 2.0;
  f.assign(grid.nodes().begin(), grid.nodes().end());
  int total = st.iterations;
  for (;;) {
    st = detail::newton_nonescaping(W, grid, e, opts, f);
    total += st.iterations;
    if (!st.converged) throw ConvergenceError("non-escaping Newton (continuation)", total, st.residual);
    if (e == eps) break;
    e = std::max(e * 0.5, eps);
  }
  if (!detail::monotone_and_bounded(f))
    throw ConvergenceError("non-escaping Newton (left monotone branch)", total, st.residual);
  return ProfilePair::nonescaping(grid, std::move(f), eps);
}

/// Continuation from eps_start down to eps by halving; used to cross-check
/// uniqueness of the discrete solve.
inline ProfilePair solve_nonescaping_by_continuation(const Potential& W, const RadialGrid& grid,
                                                     double eps, double eps_start,
                                                     const SolverOptions& opts = {}) {
  std::vector<double> f(grid.nodes().begin(), grid.nodes().end());
  double e = std::max(eps_start, eps);
  int total = 0;
  for (;;) {
    NewtonStats st = detail::newton_nonescaping(W, grid, e, opts, f);
    total += st.iterations;
    if (!st.converged) throw ConvergenceError("non-escaping continuation", total, st.residual);
    if (e == eps) break;
    e = std::max(e * 0.5, eps);
  }
  return ProfilePair::nonescaping(grid, std::move(f), eps);
}

/// Max over interior nodes of |residual| of both profile equations.
inline double profile_residual(const Potential& W, const ProfilePair& pair) {
  if (pair.is_limit())
    throw DomainError("profile_residual needs a finite epsilon (got a harmonic-limit profile)");
  std::vector<double> rf, rg;
  detail::ode_residual(W, pair.grid, pair.f, pair.g, *pair.epsilon, rf, rg);
  return std::max(detail::max_abs(rf), detail::max_abs(rg));
}

/// Discrete I_eps (without the |S^{N-1}| factor).
inline EnergyBreakdown energy_I(const Potential& W, const ProfilePair& pair) {
  if (pair.is_limit()) throw DomainError("energy_I needs a finite epsilon");
  if (pair.grid.dimension() == 2 && pair.f.front() != 0.0)
    throw DivergentEnergy("angular integral diverges for N = 2 when f(0) != 0");
  return detail::radial_energy(W, pair.grid, pair.f, pair.g, *pair.epsilon);
}

}  // namespace glv
