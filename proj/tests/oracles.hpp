#pragma once

// Reference values computed independently of the library code.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

/// J_0(x) from its power series; fine for x < 10.
inline double bessel_j0(double x) {
  double term = 1.0, sum = 1.0;
  const double q = -x * x / 4.0;
  for (int k = 1; k < 80; ++k) {
    term *= q / (double(k) * k);
    sum += term;
  }
  return sum;
}

/// First positive zero of J_0 by bisection on [2, 3].
inline double bessel_j0_first_zero() {
  double lo = 2.0, hi = 3.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (bessel_j0(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Shooting for -f'' - (N-1)/r f' + (N-1)/r^2 f = f (1 - f^2)/eps^2 (quadratic W):
/// f ~ a r near 0, RK4 outward, bisection on a so that f(1) = 1. Returns f on
/// the nodes r_i = i/J.
inline std::vector<double> shoot_profile(int N, double eps, int J) {
  const int sub = 40;
  const double h = 1.0 / (J * sub);
  const double r0 = 1e-6;
  auto rhs = [&](double r, double f, double p, double& df, double& dp) {
    df = p;
    dp = -(N - 1) / r * p + (N - 1) / (r * r) * f - f * (1.0 - f * f) / (eps * eps);
  };
  // integrates from f = a r0, f' = a; blowing past 2 counts as overshoot
  auto run = [&](double a, std::vector<double>* out) {
    double r = r0, f = a * r0, p = a;
    if (out) out->assign(J + 1, 0.0);
    for (int i = 0; i < J; ++i) {
      for (int k = 0; k < sub; ++k) {
        const double step = (i == 0 && k == 0) ? h - r0 : h;
        double k1f, k1p, k2f, k2p, k3f, k3p, k4f, k4p;
        rhs(r, f, p, k1f, k1p);
        rhs(r + step / 2, f + step / 2 * k1f, p + step / 2 * k1p, k2f, k2p);
        rhs(r + step / 2, f + step / 2 * k2f, p + step / 2 * k2p, k3f, k3p);
        rhs(r + step, f + step * k3f, p + step * k3p, k4f, k4p);
        f += step / 6 * (k1f + 2 * k2f + 2 * k3f + k4f);
        p += step / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
        r += step;
        if (std::abs(f) > 2.0) return 2.0;
      }
      if (out) (*out)[i + 1] = f;
    }
    return f;
  };
  double lo = 0.0, hi = 1.0;
  while (run(hi, nullptr) < 1.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (run(mid, nullptr) < 1.0 ? lo : hi) = mid;
  }
  std::vector<double> out;
  run(0.5 * (lo + hi), &out);
  return out;
}

/// Richardson-style ratio (a - b) / (b - c) for successive refinements.
inline double refinement_ratio(double a, double b, double c) { return (a - b) / (b - c); }

}  // namespace oracle
