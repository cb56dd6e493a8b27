#pragma once

// Minimizer (f, g) of the discrete reduced energy with f(0) = 0, f(1) = 1,
// g(1) = 0 and g free at the origin, and the escaped / non-escaped dichotomy
// across a list of epsilon values.

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "glvortex/descent.hpp"
#include "glvortex/error.hpp"
#include "glvortex/nonescaping.hpp"
#include "glvortex/radial_energy.hpp"
#include "glvortex/spectral.hpp"
#include "glvortex/tridiagonal.hpp"

namespace glv {

enum class EscapeInit { eigenfunction_bump, linear_bump, random_bump };

struct EscapeResult {
  ProfilePair pair;
  bool escaped = false;
  EnergyBreakdown energy;
  int iterations = 0;
  double residual = 0.0;
  int projection_events = 0;
};

namespace detail {

/// Residual of both equations at interior nodes plus the natural condition
/// for g at the origin (scaled like the first interior row).
inline double escaping_merit(const Potential& W, const RadialGrid& grid,
                             const std::vector<double>& f, const std::vector<double>& g,
                             double eps) {
  std::vector<double> rf, rg;
  ode_residual(W, grid, f, g, eps, rf, rg);
  const auto c = grid.cell_coefficients();
  const double origin = c[0] * std::abs(g[0] - g[1]) / grid.w(1);
  return std::max({max_abs(rf), max_abs(rg), origin});
}

inline NewtonStats newton_escaping(const Potential& W, const RadialGrid& grid, double eps,
                                   const SolverOptions& opts, std::vector<double>& f,
                                   std::vector<double>& g) {
  const std::size_t J = grid.intervals();
  const double floor = roundoff_floor(grid);
  NewtonStats st;
  std::vector<double> gf(J + 1), gg(J + 1), rhs(2 * J), tf, tg;
  auto merit = [&](const std::vector<double>& a, const std::vector<double>& b) {
    try {
      return escaping_merit(W, grid, a, b, eps);
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  st.residual = merit(f, g);
  for (st.iterations = 0; st.iterations < opts.max_iterations; ++st.iterations) {
    if (std::isnan(st.residual)) throw NumericalError("NaN in escaping Newton iterate");
    if (st.residual <= opts.tolerance) {
      st.converged = true;
      return st;
    }
    radial_gradient(W, grid, f, g, eps, gf, gg);
    const BlockHessian H = radial_hessian(W, grid, f, g, eps);
    for (std::size_t i = 0; i < J; ++i) {
      rhs[2 * i] = -gf[i];
      rhs[2 * i + 1] = -gg[i];
    }
    rhs[0] = 0.0;
    if (!linalg::solve_block_tridiagonal(H.lower, H.diag, H.upper, rhs)) break;
    bool accepted = false;
    double t = 1.0;
    for (int k = 0; k < 40; ++k, t *= 0.5) {
      tf = f;
      tg = g;
      for (std::size_t i = 0; i < J; ++i) {
        tf[i] += t * rhs[2 * i];
        tg[i] += t * rhs[2 * i + 1];
      }
      tf[0] = 0.0;
      const double res = merit(tf, tg);
      if (res < st.residual) {
        f.swap(tf);
        g.swap(tg);
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

struct EscapeSolveState {
  std::vector<double> f, g;
  int iterations = 0;
  int projections = 0;
  double residual = 0.0;
};

/// Descent to the Newton hand-off, then Newton; a tighter descent retry if
/// Newton stalls.
inline bool minimize_pair(const Potential& W, const RadialGrid& grid, double eps,
                          const SolverOptions& opts, EscapeSolveState& s) {
  const std::size_t J = grid.intervals();
  const std::size_t n = J + 1;
  const auto c = grid.cell_coefficients();
  const auto w = grid.weights();
  const auto r = grid.nodes();
  const int N = grid.dimension();
  const double inv_eps2 = 1.0 / (eps * eps);

  // x = [f_0..f_J, g_0..g_J]
  std::vector<double> pf_d(J - 1), pf_e(J - 2), pg_d(J), pg_e(J - 1);
  for (std::size_t i = 1; i < J; ++i) {
    pf_d[i - 1] = c[i - 1] + c[i] + w[i] * ((N - 1) / (r[i] * r[i]) + inv_eps2);
    if (i + 1 < J) pf_e[i - 1] = -c[i];
  }
  for (std::size_t i = 0; i < J; ++i) {
    pg_d[i] = c[i] + (i > 0 ? c[i - 1] + w[i] * inv_eps2 : 0.0);
    if (i + 1 < J) pg_e[i] = -c[i];
  }

  DescentProblem prob;
  prob.energy = [&](const std::vector<double>& x) {
    return radial_energy_total(W, grid, std::span(x).first(n), std::span(x).subspan(n), eps);
  };
  prob.gradient = [&](const std::vector<double>& x, std::vector<double>& G) {
    auto xs = std::span(x);
    auto gs = std::span(G);
    radial_gradient(W, grid, xs.first(n), xs.subspan(n), eps, gs.first(n), gs.subspan(n));
    G[0] = G[J] = G[n + J] = 0.0;
  };
  prob.precondition = [&](std::vector<double>& v) {
    std::span<double> fv(v.data() + 1, J - 1), gv(v.data() + n, J);
    linalg::solve_symmetric_tridiagonal(pf_d, pf_e, fv);
    linalg::solve_symmetric_tridiagonal(pg_d, pg_e, gv);
    v[0] = v[J] = v[n + J] = 0.0;
  };
  prob.project = [&](std::vector<double>& x) {
    int events = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double m2 = x[i] * x[i] + x[n + i] * x[n + i];
      if (m2 > 1.0 + 1e-6) {
        const double s = 1.0 / std::sqrt(m2);
        x[i] *= s;
        x[n + i] *= s;
        ++events;
      }
    }
    return events;
  };

  std::vector<double> x(2 * n);
  std::copy(s.f.begin(), s.f.end(), x.begin());
  std::copy(s.g.begin(), s.g.end(), x.begin() + n);
  double switch_tol = opts.gradient_switch;
  for (int attempt = 0; attempt < 3; ++attempt, switch_tol *= 1e-3) {
    s.projections += prob.project(x);
    DescentStats ds = bb_descent(prob, x, switch_tol, opts.max_descent_iterations);
    s.iterations += ds.iterations;
    s.projections += ds.projections;
    std::vector<double> f(x.begin(), x.begin() + n), g(x.begin() + n, x.end());
    NewtonStats ns = newton_escaping(W, grid, eps, opts, f, g);
    s.iterations += ns.iterations;
    s.residual = ns.residual;
    if (ns.converged) {
      s.f = std::move(f);
      s.g = std::move(g);
      s.f[0] = 0.0;
      s.f[J] = 1.0;
      s.g[J] = 0.0;
      return true;
    }
  }
  return false;
}

inline std::vector<double> initial_bump(const RadialGrid& grid, EscapeInit init,
                                        const std::vector<double>& psi1, std::uint64_t seed) {
  std::vector<double> g(grid.size(), 0.0);
  switch (init) {
    case EscapeInit::eigenfunction_bump: {
      const double m = *std::max_element(psi1.begin(), psi1.end());
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = 0.5 * psi1[i] / m;
      break;
    }
    case EscapeInit::linear_bump:
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = 0.3 * (1.0 - grid.r(i));
      break;
    case EscapeInit::random_bump: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> U(0.5, 1.0);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = grid.r(i);
        g[i] = 0.5 * (1.0 - r * r) * U(rng);
      }
      break;
    }
  }
  g.back() = 0.0;
  return g;
}

}  // namespace detail

/// Local minimizer of the discrete I_eps from (f_eps, bump). The sign of g is
/// normalized to g >= 0; a non-escaped outcome returns (f_eps, 0).
inline EscapeResult solve_escaping_profile(const Potential& W, const RadialGrid& grid, double eps,
                                           const SolverOptions& opts = {},
                                           EscapeInit init = EscapeInit::eigenfunction_bump) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("epsilon must be positive");
  if (!W.strictly_convex_flag())
    throw DomainError("escaping solver requires a strictly convex potential");
  const std::size_t J = grid.intervals();
  ProfilePair base = solve_nonescaping_profile(W, grid, eps, opts);
  const SpectralResult lin = principal_eigenpair(assemble_linearized(W, base, eps));

  detail::EscapeSolveState s;
  s.f = base.f;
  s.g = detail::initial_bump(grid, init, lin.eigenfunction, opts.seed);
  if (!detail::minimize_pair(W, grid, eps, opts, s))
    throw ConvergenceError("escaping minimization", s.iterations, s.residual);

  auto max_abs_g = [&] { return detail::max_abs(s.g); };
  if (max_abs_g() <= opts.escape_threshold && lin.eigenvalue < 0.0) {
    // landed on the unstable (f_eps, 0): push off along psi_1 and descend further
    const double m = *std::max_element(lin.eigenfunction.begin(), lin.eigenfunction.end());
    for (std::size_t i = 0; i <= J; ++i) s.g[i] = 0.05 * lin.eigenfunction[i] / m;
    SolverOptions tight = opts;
    tight.gradient_switch = opts.gradient_switch * 1e-2;
    if (!detail::minimize_pair(W, grid, eps, tight, s))
      throw ConvergenceError("escaping minimization (restart)", s.iterations, s.residual);
  }

  double sum = 0.0;
  for (double v : s.g) sum += v;
  if (sum < 0.0)
    for (double& v : s.g) v = -v;

  EscapeResult out{base};
  out.iterations = s.iterations;
  out.projection_events = s.projections;
  out.escaped = *std::max_element(s.g.begin(), s.g.end()) > opts.escape_threshold;
  if (out.escaped) {
    out.pair = ProfilePair(grid, std::move(s.f), std::move(s.g), eps);
    out.residual = s.residual;
  } else {
    out.residual = profile_residual(W, base);
  }
  out.energy = energy_I(W, out.pair);
  return out;
}

/// Max interior residual of both coupled equations.
inline double escaping_residual(const Potential& W, const ProfilePair& pair) {
  pair.require_boundary_data();
  return profile_residual(W, pair);
}

inline double escaping_residual(const Potential& W, const EscapeResult& result) {
  return escaping_residual(W, result.pair);
}

struct DichotomyRow {
  double epsilon = 0.0;
  bool escaped = false;
  std::optional<double> I_escaping;
  double I_nonescaping = std::nan("");
  double energy_gap = std::nan("");
  std::string classification;  // "escaping", "non-escaping", "marginal" or "failed"
  std::optional<std::string> error;
};

struct DichotomyReport {
  int N = 0;
  double epsilon_N = 0.0;
  double bracket_tol = 0.0;
  std::vector<DichotomyRow> rows;
};

inline DichotomyRow dichotomy_row(const Potential& W, const RadialGrid& grid, double eps,
                                  double eps_N, double bracket_tol, const SolverOptions& opts) {
  DichotomyRow row;
  row.epsilon = eps;
  try {
    const ProfilePair base = solve_nonescaping_profile(W, grid, eps, opts);
    row.I_nonescaping = energy_I(W, base).total;
    const EscapeResult res = solve_escaping_profile(W, grid, eps, opts);
    row.escaped = res.escaped;
    if (res.escaped) row.I_escaping = res.energy.total;
    row.energy_gap = row.I_nonescaping - res.energy.total;
    if (std::abs(eps - eps_N) <= bracket_tol)
      row.classification = "marginal";
    else
      row.classification = res.escaped ? "escaping" : "non-escaping";
  } catch (const Error& e) {
    row.classification = "failed";
    row.error = e.what();
  }
  return row;
}

/// One row per epsilon, solved concurrently; a failing row records its error
/// and does not abort the sweep.
inline DichotomyReport classify_dichotomy(const Potential& W, int N, const RadialGrid& grid,
                                          const std::vector<double>& epsilons,
                                          const SolverOptions& opts = {},
                                          double bracket_tol = 1e-6) {
  DichotomyReport rep;
  rep.N = N;
  rep.bracket_tol = bracket_tol;
  rep.epsilon_N = find_epsilon_N(W, N, grid, bracket_tol, opts);
  std::vector<std::future<DichotomyRow>> jobs;
  for (double eps : epsilons)
    jobs.push_back(std::async(std::launch::async, [&, eps] {
      return dichotomy_row(W, grid, eps, rep.epsilon_N, bracket_tol, opts);
    }));
  for (auto& j : jobs) rep.rows.push_back(j.get());
  return rep;
}

/// n log-spaced values over [lo, hi].
inline std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> v;
  if (n == 1) return {lo};
  for (int k = 0; k < n; ++k) v.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1)));
  return v;
}

}  // namespace glv
