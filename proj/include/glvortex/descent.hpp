#pragma once

// Preconditioned gradient descent with Barzilai-Borwein steps and Armijo
// backtracking. Used as the globalization phase before Newton in the radial
// minimizers.

#include <cmath>
#include <functional>
#include <vector>

namespace glv::detail {

struct DescentProblem {
  std::function<double(const std::vector<double>&)> energy;
  /// Gradient with fixed unknowns already zeroed.
  std::function<void(const std::vector<double>&, std::vector<double>&)> gradient;
  /// Replaces r by P^{-1} r for an SPD preconditioner P.
  std::function<void(std::vector<double>&)> precondition;
  /// Optional feasibility repair after a step; returns the number of corrections.
  std::function<int(std::vector<double>&)> project;
};

struct DescentStats {
  int iterations = 0;
  double dual_norm = 0.0;  // sqrt(G^T P^{-1} G)
  int projections = 0;
  bool converged = false;
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline DescentStats bb_descent(const DescentProblem& p, std::vector<double>& x, double tol,
                               int max_iterations) {
  DescentStats st;
  const std::size_t n = x.size();
  std::vector<double> G(n), Z(n), Gnew(n), Znew(n), trial(n);
  double E = p.energy(x);
  p.gradient(x, G);
  Z = G;
  p.precondition(Z);
  double alpha = 1.0;
  for (st.iterations = 0; st.iterations < max_iterations; ++st.iterations) {
    const double gz = dot(G, Z);
    st.dual_norm = std::sqrt(std::max(gz, 0.0));
    if (!std::isfinite(E) || !std::isfinite(gz)) return st;
    if (st.dual_norm < tol) {
      st.converged = true;
      return st;
    }
    double t = alpha;
    bool accepted = false;
    double Etrial = E;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] - t * Z[i];
      int events = p.project ? p.project(trial) : 0;
      Etrial = p.energy(trial);
      if (std::isfinite(Etrial) && Etrial <= E - 1e-4 * t * gz) {
        st.projections += events;
        accepted = true;
        break;
      }
    }
    if (!accepted) return st;  // no sufficient decrease: stalled at rounding level
    p.gradient(trial, Gnew);
    Znew = Gnew;
    p.precondition(Znew);
    // BB step from s = x+ - x, y = G+ - G in the P^{-1} metric
    double sy = 0.0, yzy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = trial[i] - x[i], y = Gnew[i] - G[i], zy = Znew[i] - Z[i];
      sy += s * y;
      yzy += y * zy;
    }
    alpha = (sy > 0.0 && yzy > 0.0) ? sy / yzy : std::min(1.0, 2.0 * t);
    x.swap(trial);
    G.swap(Gnew);
    Z.swap(Znew);
    E = Etrial;
  }
  const double gz = dot(G, Z);
  st.dual_norm = std::sqrt(std::max(gz, 0.0));
  st.converged = st.dual_norm < tol;
  return st;
}

}  // namespace glv::detail
