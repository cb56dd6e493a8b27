#pragma once

// Principal Dirichlet eigenpair of the radial operator
//   L psi = -psi'' - (N-1)/r psi' + V(r) psi,  psi(1) = 0,
// in the weighted inner product <u,v> = \int_0^1 u v r^{N-1} dr, with
// V = -W'(1 - f_eps^2)/eps^2 for the linearization at f_eps, and the
// threshold epsilon_N where its principal eigenvalue changes sign.

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "glvortex/error.hpp"
#include "glvortex/nonescaping.hpp"
#include "glvortex/potential.hpp"
#include "glvortex/radial_grid.hpp"
#include "glvortex/tridiagonal.hpp"

namespace glv {

/// Discrete L as a symmetric tridiagonal matrix on the unknowns psi_1..psi_{J-1}
/// after the substitution phi_i = sqrt(w_i) psi_i. At r = 0 either the natural
/// condition (psi_0 = psi_1, the weight vanishes there) or a pinned zero.
struct SturmLiouvilleSystem {
  RadialGrid grid;
  double epsilon = std::numeric_limits<double>::infinity();
  bool pinned_origin = false;
  std::vector<double> potential;     // V at every node
  std::vector<double> diagonal;      // J-1 entries
  std::vector<double> off_diagonal;  // J-2 entries

  /// Nodal (L psi)_i for i = 1..J-1; zero at i = 0 and i = J.
  std::vector<double> apply(std::span<const double> psi) const {
    check_length(grid, psi.size());
    const std::size_t J = grid.intervals();
    const auto c = grid.cell_coefficients();
    const auto w = grid.weights();
    std::vector<double> p(psi.begin(), psi.end());
    p[0] = pinned_origin ? 0.0 : p[1];
    p[J] = 0.0;
    std::vector<double> out(J + 1, 0.0);
    for (std::size_t i = 1; i < J; ++i) {
      const double flux = c[i] * (p[i + 1] - p[i]) - c[i - 1] * (p[i] - p[i - 1]);
      out[i] = (-flux + w[i] * potential[i] * p[i]) / w[i];
    }
    return out;
  }

  /// \int u v r^{N-1} over the unknown nodes.
  double inner(std::span<const double> u, std::span<const double> v) const {
    const auto w = grid.weights();
    double s = 0.0;
    for (std::size_t i = 1; i < grid.intervals(); ++i) s += w[i] * u[i] * v[i];
    return s;
  }
};

struct SpectralResult {
  double eigenvalue = 0.0;
  std::vector<double> eigenfunction;  // J+1 values, \int psi^2 r^{N-1} = 1
  int iterations = 0;
};

namespace detail {

inline SturmLiouvilleSystem make_sturm_liouville(const RadialGrid& grid,
                                                 std::vector<double> potential, double eps,
                                                 bool pinned_origin) {
  check_length(grid, potential.size());
  const std::size_t J = grid.intervals();
  const auto c = grid.cell_coefficients();
  const auto w = grid.weights();
  SturmLiouvilleSystem s{grid};
  s.epsilon = eps;
  s.pinned_origin = pinned_origin;
  s.potential = std::move(potential);
  s.diagonal.resize(J - 1);
  s.off_diagonal.resize(J - 2);
  for (std::size_t i = 1; i < J; ++i) {
    const double left = (i > 1 || pinned_origin) ? c[i - 1] : 0.0;
    s.diagonal[i - 1] = (c[i] + left) / w[i] + s.potential[i];
    if (i + 1 < J) s.off_diagonal[i - 1] = -c[i] / std::sqrt(w[i] * w[i + 1]);
  }
  return s;
}

}  // namespace detail

/// Linearized operator -Delta - W'(1 - f_eps^2)/eps^2 at a converged g = 0 profile.
inline SturmLiouvilleSystem assemble_linearized(const Potential& W, const ProfilePair& profile,
                                                double eps) {
  if (profile.is_limit()) throw DomainError("linearization needs a finite-epsilon profile");
  if (std::abs(*profile.epsilon - eps) > 1e-12 * eps) throw EpsilonMismatch(eps, *profile.epsilon);
  for (double gv : profile.g)
    if (gv != 0.0) throw DomainError("linearization is taken at a non-escaping profile (g = 0)");
  std::vector<double> V(profile.grid.size());
  const double inv_eps2 = 1.0 / (eps * eps);
  for (std::size_t i = 0; i < V.size(); ++i)
    V[i] = -inv_eps2 * W(1.0 - profile.f[i] * profile.f[i]).Wp;
  return detail::make_sturm_liouville(profile.grid, std::move(V), eps, false);
}

/// Smallest eigenvalue and its nodeless eigenfunction. The shift for inverse
/// iteration starts at the Gershgorin lower bound and is raised to just below
/// the eigenvalue by Sturm-count bisection.
inline SpectralResult principal_eigenpair(const SturmLiouvilleSystem& sys) {
  const auto& d = sys.diagonal;
  const auto& e = sys.off_diagonal;
  const std::size_t n = d.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = lo;
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double radius = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(e[i]) : 0.0);
    lo = std::min(lo, d[i] - radius);
    hi = std::min(hi, d[i]);
    norm = std::max(norm, std::abs(d[i]) + radius);
  }
  lo -= 1e-12 * (1.0 + norm);
  hi += 1e-12 * (1.0 + norm);
  while (hi - lo > 4.0 * DBL_EPSILON * std::max(std::abs(lo), std::abs(hi)) + 1e-300) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (linalg::sturm_count(d, e, mid) == 0)
      lo = mid;
    else
      hi = mid;
  }
  const double shift = lo - 1e-9 * norm - 1e-12;
  std::vector<double> a(n, 0.0), b(n), c(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    b[i] = d[i] - shift;
    if (i + 1 < n) {
      c[i] = e[i];
      a[i + 1] = e[i];
    }
  }
  std::vector<double> phi(n, 1.0), prev;
  double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (double& x : phi) x *= scale;
  SpectralResult out;
  bool converged = false;
  for (out.iterations = 1; out.iterations <= 500; ++out.iterations) {
    prev = phi;
    if (!linalg::solve_tridiagonal(a, b, c, phi))
      throw NumericalError("singular shifted matrix in inverse iteration");
    double nrm = 0.0;
    for (double x : phi) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (!std::isfinite(nrm) || nrm == 0.0) throw NumericalError("inverse iteration broke down");
    double sum = 0.0;
    for (double x : phi) sum += x;
    const double sgn = sum < 0 ? -1.0 : 1.0;
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      phi[i] *= sgn / nrm;
      change = std::max(change, std::abs(phi[i] - prev[i]));
    }
    if (change < 1e-13) {
      converged = true;
      break;
    }
  }
  if (!converged) throw ConvergenceError("principal eigenpair inverse iteration", 500, 0.0);

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double tphi = d[i] * phi[i];
    if (i > 0) tphi += e[i - 1] * phi[i - 1];
    if (i + 1 < n) tphi += e[i] * phi[i + 1];
    num += phi[i] * tphi;
    den += phi[i] * phi[i];
  }
  out.eigenvalue = num / den;

  const std::size_t J = sys.grid.intervals();
  const auto w = sys.grid.weights();
  out.eigenfunction.assign(J + 1, 0.0);
  double mass = 0.0;
  for (std::size_t i = 1; i < J; ++i) {
    out.eigenfunction[i] = phi[i - 1] / std::sqrt(w[i]);
    mass += phi[i - 1] * phi[i - 1];
  }
  out.eigenfunction[0] = sys.pinned_origin ? 0.0 : out.eigenfunction[1];
  const double s = 1.0 / std::sqrt(mass);
  for (double& x : out.eigenfunction) x *= s;
  return out;
}

/// Principal Dirichlet eigenvalue of -Delta on B^N.
inline double dirichlet_lambda1(int N, const RadialGrid& grid) {
  if (N < 2) throw SizingError("dirichlet_lambda1 needs N >= 2");
  if (grid.dimension() != N) throw SizingError("grid dimension differs from N");
  auto sys = detail::make_sturm_liouville(grid, std::vector<double>(grid.size(), 0.0),
                                          std::numeric_limits<double>::infinity(), false);
  return principal_eigenpair(sys).eigenvalue;
}

/// (N-2)^2/4 - (N-1).
constexpr double hardy_constant(int N) { return (N - 2.0) * (N - 2.0) / 4.0 - (N - 1.0); }

struct LinearizedSpectrum {
  ProfilePair profile;
  SpectralResult spectrum;
};

/// Solves f_eps then the principal eigenpair of its linearization.
inline LinearizedSpectrum linearized_spectrum(const Potential& W, const RadialGrid& grid,
                                              double eps, const SolverOptions& opts = {},
                                              const std::vector<double>* warm = nullptr) {
  ProfilePair prof = solve_nonescaping_profile(W, grid, eps, opts, warm);
  SpectralResult sr = principal_eigenpair(assemble_linearized(W, prof, eps));
  return {std::move(prof), std::move(sr)};
}

inline double ell_of_epsilon(const Potential& W, const RadialGrid& grid, double eps,
                             const SolverOptions& opts = {}) {
  return linearized_spectrum(W, grid, eps, opts).spectrum.eigenvalue;
}

struct ThresholdResult {
  int N = 0;
  double epsilon_N = 0.0;
  double lambda1 = 0.0;
  double upper_bound = 0.0;  // sqrt(W'(1) / lambda1)
  double bracket_lo = 0.0, bracket_hi = 0.0;
  int evaluations = 0;
};

/// Bisection on the sign of ell(eps) over [1e-3, sqrt(W'(1)/lambda1)].
inline ThresholdResult threshold_search(const Potential& W, int N, const RadialGrid& grid,
                                        double tol = 1e-6, const SolverOptions& opts = {},
                                        double lower = 1e-3) {
  if (N >= 7) throw NoThresholdError(N);
  if (N < 2) throw SizingError("threshold search needs 2 <= N <= 6");
  if (grid.dimension() != N) throw SizingError("grid dimension differs from N");
  ThresholdResult out;
  out.N = N;
  out.lambda1 = dirichlet_lambda1(N, grid);
  out.upper_bound = std::sqrt(W(1.0).Wp / out.lambda1);
  double lo = lower, hi = out.upper_bound;
  LinearizedSpectrum at_lo = linearized_spectrum(W, grid, lo, opts);
  LinearizedSpectrum at_hi = linearized_spectrum(W, grid, hi, opts);
  out.evaluations = 2;
  const double ell_lo = at_lo.spectrum.eigenvalue, ell_hi = at_hi.spectrum.eigenvalue;
  if (!(ell_lo < 0.0) || !(ell_hi > 0.0)) throw BracketError(lo, ell_lo, hi, ell_hi);
  std::vector<double> f_lo = at_lo.profile.f, f_hi = at_hi.profile.f;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    // warm start from the closer endpoint
    const std::vector<double>* warm = (mid - lo < hi - mid) ? &f_lo : &f_hi;
    LinearizedSpectrum m = linearized_spectrum(W, grid, mid, opts, warm);
    ++out.evaluations;
    if (m.spectrum.eigenvalue < 0.0) {
      lo = mid;
      f_lo = std::move(m.profile.f);
    } else {
      hi = mid;
      f_hi = std::move(m.profile.f);
    }
  }
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.epsilon_N = 0.5 * (lo + hi);
  return out;
}

inline double find_epsilon_N(const Potential& W, int N, const RadialGrid& grid,
                             double tol = 1e-6, const SolverOptions& opts = {}) {
  return threshold_search(W, N, grid, tol, opts).epsilon_N;
}

}  // namespace glv
