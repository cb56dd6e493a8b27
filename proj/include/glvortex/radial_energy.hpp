#pragma once

// Discrete reduced energy
//
//   I_h(f,g) = 1/2 sum_cells c_{i+1/2} [(f_{i+1}-f_i)^2 + (g_{i+1}-g_i)^2]
//            + 1/2 sum_nodes w_i [ (N-1) f_i^2 / r_i^2 + W(1 - f_i^2 - g_i^2) / eps^2 ]
//
// with c_{i+1/2} = r_{i+1/2}^{N-1}/h and trapezoid weights w_i (w_0 = 0).
// Its gradient divided by w_i is a conservative finite-difference form of the
// profile ODEs, so every radial solver, quadratic form and eigenproblem below
// is built from this single functional.

#include <cmath>
#include <span>
#include <vector>

#include "glvortex/potential.hpp"
#include "glvortex/radial_grid.hpp"
#include "glvortex/tridiagonal.hpp"

namespace glv {

struct EnergyBreakdown {
  double gradient_f = 0.0;
  double gradient_g = 0.0;
  double angular = 0.0;    // (N-1)/r^2 f^2 term
  double potential = 0.0;  // W term, 1/(2 eps^2) included
  double total = 0.0;
};

namespace detail {

inline double potential_argument(double f, double g) { return 1.0 - f * f - g * g; }

inline EnergyBreakdown radial_energy(const Potential& W, const RadialGrid& grid,
                                     std::span<const double> f, std::span<const double> g,
                                     double eps) {
  const auto c = grid.cell_coefficients();
  const auto w = grid.weights();
  const auto r = grid.nodes();
  const std::size_t J = grid.intervals();
  const int N = grid.dimension();
  EnergyBreakdown e;
  for (std::size_t i = 0; i < J; ++i) {
    const double df = f[i + 1] - f[i], dg = g[i + 1] - g[i];
    e.gradient_f += 0.5 * c[i] * df * df;
    e.gradient_g += 0.5 * c[i] * dg * dg;
  }
  const double inv_eps2 = 1.0 / (eps * eps);
  for (std::size_t i = 1; i <= J; ++i) {
    e.angular += 0.5 * w[i] * (N - 1) * f[i] * f[i] / (r[i] * r[i]);
    e.potential += 0.5 * w[i] * inv_eps2 * W(potential_argument(f[i], g[i])).W;
  }
  e.total = e.gradient_f + e.gradient_g + e.angular + e.potential;
  return e;
}

inline double radial_energy_total(const Potential& W, const RadialGrid& grid,
                                  std::span<const double> f, std::span<const double> g,
                                  double eps) {
  return radial_energy(W, grid, f, g, eps).total;
}

/// Raw gradient dI_h/df_i, dI_h/dg_i at every node (boundary entries included).
inline void radial_gradient(const Potential& W, const RadialGrid& grid,
                            std::span<const double> f, std::span<const double> g, double eps,
                            std::span<double> gf, std::span<double> gg) {
  const auto c = grid.cell_coefficients();
  const auto w = grid.weights();
  const auto r = grid.nodes();
  const std::size_t J = grid.intervals();
  const int N = grid.dimension();
  std::fill(gf.begin(), gf.end(), 0.0);
  std::fill(gg.begin(), gg.end(), 0.0);
  for (std::size_t i = 0; i < J; ++i) {
    const double ff = c[i] * (f[i + 1] - f[i]);
    const double fg = c[i] * (g[i + 1] - g[i]);
    gf[i] -= ff;
    gf[i + 1] += ff;
    gg[i] -= fg;
    gg[i + 1] += fg;
  }
  const double inv_eps2 = 1.0 / (eps * eps);
  for (std::size_t i = 1; i <= J; ++i) {
    const double wp = W(potential_argument(f[i], g[i])).Wp;
    gf[i] += w[i] * ((N - 1) * f[i] / (r[i] * r[i]) - inv_eps2 * wp * f[i]);
    gg[i] += w[i] * (-inv_eps2 * wp * g[i]);
  }
}

/// Nodewise residual of the profile ODEs, i = 1..J-1 (entries 0 and J are zero):
///   Rf = -f'' - (N-1)/r f' + (N-1)/r^2 f - W'(1-f^2-g^2) f / eps^2
///   Rg = -g'' - (N-1)/r g' - W'(1-f^2-g^2) g / eps^2
inline void ode_residual(const Potential& W, const RadialGrid& grid, std::span<const double> f,
                         std::span<const double> g, double eps, std::vector<double>& rf,
                         std::vector<double>& rg) {
  const std::size_t n = grid.size();
  rf.assign(n, 0.0);
  rg.assign(n, 0.0);
  radial_gradient(W, grid, f, g, eps, rf, rg);
  const auto w = grid.weights();
  rf[0] = rg[0] = rf[n - 1] = rg[n - 1] = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    rf[i] /= w[i];
    rg[i] /= w[i];
  }
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Hessian of I_h with 2x2 blocks per node 0..J-1 (unknown order f_i, g_i).
/// Row f_0 is replaced by identity since f(0) = 0 is imposed.
struct BlockHessian {
  std::vector<linalg::Block> lower, diag, upper;
};

inline BlockHessian radial_hessian(const Potential& W, const RadialGrid& grid,
                                   std::span<const double> f, std::span<const double> g,
                                   double eps) {
  const auto c = grid.cell_coefficients();
  const auto w = grid.weights();
  const auto r = grid.nodes();
  const std::size_t J = grid.intervals();
  const int N = grid.dimension();
  const double inv_eps2 = 1.0 / (eps * eps);
  BlockHessian H;
  H.lower.assign(J, {0, 0, 0, 0});
  H.diag.assign(J, {0, 0, 0, 0});
  H.upper.assign(J, {0, 0, 0, 0});
  for (std::size_t i = 0; i < J; ++i) {
    const double stiff = c[i] + (i > 0 ? c[i - 1] : 0.0);
    linalg::Block d{stiff, 0.0, 0.0, stiff};
    if (i > 0) {
      const PotentialValue p = W(potential_argument(f[i], g[i]));
      d[0] += w[i] * ((N - 1) / (r[i] * r[i]) + inv_eps2 * (-p.Wp + 2.0 * f[i] * f[i] * p.Wpp));
      d[1] = d[2] = w[i] * inv_eps2 * 2.0 * f[i] * g[i] * p.Wpp;
      d[3] += w[i] * inv_eps2 * (-p.Wp + 2.0 * g[i] * g[i] * p.Wpp);
    }
    H.diag[i] = d;
    if (i + 1 < J) H.upper[i] = {-c[i], 0.0, 0.0, -c[i]};
    if (i > 0) H.lower[i] = {-c[i - 1], 0.0, 0.0, -c[i - 1]};
  }
  // f_0 is pinned: decouple it.
  H.diag[0][0] = 1.0;
  H.diag[0][1] = H.diag[0][2] = 0.0;
  H.upper[0][0] = H.upper[0][1] = 0.0;
  if (J > 1) H.lower[1][0] = H.lower[1][2] = 0.0;
  return H;
}

}  // namespace detail
}  // namespace glv
