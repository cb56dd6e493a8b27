#pragma once

// Banded solvers used by the Newton and eigenvalue iterations. All of them
// are plain O(n) elimination without pivoting; callers only pass diagonally
// dominant or positive definite systems.

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "glvortex/error.hpp"

namespace glv::linalg {

/// Solves the tridiagonal system with sub-diagonal a (a[0] unused), diagonal b,
/// super-diagonal c (c[n-1] unused). Returns false on a zero pivot.
inline bool solve_tridiagonal(std::span<const double> a, std::span<const double> b,
                              std::span<const double> c, std::span<double> x) {
  const std::size_t n = b.size();
  std::vector<double> cp(n), dp(n);
  double piv = b[0];
  if (piv == 0.0) return false;
  cp[0] = n > 1 ? c[0] / piv : 0.0;
  dp[0] = x[0] / piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = b[i] - a[i] * cp[i - 1];
    if (piv == 0.0 || !std::isfinite(piv)) return false;
    cp[i] = i + 1 < n ? c[i] / piv : 0.0;
    dp[i] = (x[i] - a[i] * dp[i - 1]) / piv;
  }
  x[n - 1] = dp[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
  return true;
}

/// Symmetric variant: d diagonal (n), e off-diagonal (n-1).
inline bool solve_symmetric_tridiagonal(std::span<const double> d, std::span<const double> e,
                                        std::span<double> x) {
  const std::size_t n = d.size();
  std::vector<double> a(n, 0.0), c(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    c[i] = e[i];
    a[i + 1] = e[i];
  }
  return solve_tridiagonal(a, d, c, x);
}

/// Number of eigenvalues of the symmetric tridiagonal (d, e) strictly below x
/// (Sturm count from the LDL^T pivots of T - xI).
inline int sturm_count(std::span<const double> d, std::span<const double> e, double x) {
  int count = 0;
  double q = d[0] - x;
  if (q < 0) ++count;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (q == 0.0) q = 1e-300;
    q = d[i] - x - e[i - 1] * e[i - 1] / q;
    if (q < 0) ++count;
  }
  return count;
}

/// True if every LDL^T pivot is positive (matrix positive definite).
inline bool is_positive_definite(std::span<const double> d, std::span<const double> e) {
  double q = d[0];
  if (!(q > 0)) return false;
  for (std::size_t i = 1; i < d.size(); ++i) {
    q = d[i] - e[i - 1] * e[i - 1] / q;
    if (!(q > 0)) return false;
  }
  return true;
}

using Block = std::array<double, 4>;  // row-major 2x2

inline Block block_mul(const Block& x, const Block& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
          x[2] * y[1] + x[3] * y[3]};
}

inline bool block_inverse(const Block& m, Block& inv) {
  const double det = m[0] * m[3] - m[1] * m[2];
  if (det == 0.0 || !std::isfinite(det)) return false;
  inv = {m[3] / det, -m[1] / det, -m[2] / det, m[0] / det};
  return true;
}

/// Block-tridiagonal solve with 2x2 blocks: lower[i] couples row i to i-1,
/// upper[i] couples row i to i+1. rhs holds pairs (x_{2i}, x_{2i+1}).
inline bool solve_block_tridiagonal(std::span<const Block> lower, std::span<const Block> diag,
                                    std::span<const Block> upper, std::span<double> rhs) {
  const std::size_t n = diag.size();
  std::vector<Block> cp(n);
  std::vector<std::array<double, 2>> dp(n);
  Block inv;
  for (std::size_t i = 0; i < n; ++i) {
    Block m = diag[i];
    std::array<double, 2> r{rhs[2 * i], rhs[2 * i + 1]};
    if (i > 0) {
      const Block lc = block_mul(lower[i], cp[i - 1]);
      for (int k = 0; k < 4; ++k) m[k] -= lc[k];
      r[0] -= lower[i][0] * dp[i - 1][0] + lower[i][1] * dp[i - 1][1];
      r[1] -= lower[i][2] * dp[i - 1][0] + lower[i][3] * dp[i - 1][1];
    }
    if (!block_inverse(m, inv)) return false;
    if (i + 1 < n) cp[i] = block_mul(inv, upper[i]);
    dp[i] = {inv[0] * r[0] + inv[1] * r[1], inv[2] * r[0] + inv[3] * r[1]};
  }
  rhs[2 * (n - 1)] = dp[n - 1][0];
  rhs[2 * (n - 1) + 1] = dp[n - 1][1];
  for (std::size_t i = n - 1; i-- > 0;) {
    const double x0 = rhs[2 * (i + 1)], x1 = rhs[2 * (i + 1) + 1];
    rhs[2 * i] = dp[i][0] - (cp[i][0] * x0 + cp[i][1] * x1);
    rhs[2 * i + 1] = dp[i][1] - (cp[i][2] * x0 + cp[i][3] * x1);
  }
  return true;
}

}  // namespace glv::linalg
