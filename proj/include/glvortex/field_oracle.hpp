#pragma once

// Brute-force minimization of the full energy
//   E(u) = \int |grad u|^2 / 2 + W(1 - |u|^2) / (2 eps^2),  u : B^2 x (0,1) -> R^3,
// with u = (x/|x|, 0) on the lateral boundary and free ends in z. Independent
// of the radial code: Cartesian mask in the disk, trapezoid weights in z.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "glvortex/error.hpp"
#include "glvortex/potential.hpp"
#include "glvortex/radial_grid.hpp"

namespace glv {

enum class NodeClass : std::uint8_t { interior, dirichlet, exterior };

class CylinderGrid {
 public:
  static constexpr int M = 3;

  CylinderGrid(int K, int L) : K_(K), L_(L) {
    if (K < 32 || K % 2 != 0) throw SizingError("cylinder grid needs even K >= 32");
    if (L < 8) throw SizingError("cylinder grid needs L >= 8");
    const int n = K + 1;
    cls_.assign(static_cast<std::size_t>(n) * n, NodeClass::exterior);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (radius2(a, b) < 1.0 - 1e-12) cls_[a * n + b] = NodeClass::interior;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        if (cls_[a * n + b] == NodeClass::interior) continue;
        const int da[4] = {1, -1, 0, 0}, db[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int p = a + da[k], q = b + db[k];
          if (p >= 0 && p < n && q >= 0 && q < n && cls_[p * n + q] == NodeClass::interior)
            cls_[a * n + b] = NodeClass::dirichlet;
        }
      }
  }

  int K() const { return K_; }
  int L() const { return L_; }
  int side() const { return K_ + 1; }
  double hx() const { return 2.0 / K_; }
  double hz() const { return 1.0 / L_; }
  double x(int a) const { return -1.0 + 2.0 * a / K_; }
  double radius2(int a, int b) const { return x(a) * x(a) + x(b) * x(b); }
  NodeClass cls(int a, int b) const { return cls_[a * side() + b]; }
  /// Trapezoid weight of layer l.
  double wz(int l) const { return (l == 0 || l == L_) ? 0.5 * hz() : hz(); }
  std::size_t plane() const { return static_cast<std::size_t>(side()) * side(); }
  std::size_t node_count() const { return plane() * (L_ + 1); }
  /// Flat index of component m at (x index a, y index b, layer l); z outermost.
  std::size_t index(int a, int b, int l, int m = 0) const {
    return ((static_cast<std::size_t>(l) * side() + a) * side() + b) * M + m;
  }

 private:
  int K_, L_;
  std::vector<NodeClass> cls_;
};

struct FieldState {
  CylinderGrid grid;
  std::vector<double> values;  // node_count() * 3
  double epsilon = 0.0;
  double energy = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::uint64_t seed = 0;
};

struct OracleOptions {
  double tolerance = 1e-6;  // max-norm of the gradient per unit volume
  int max_iterations = 200000;
};

namespace detail {

inline void apply_boundary(const CylinderGrid& G, std::vector<double>& u) {
  for (int l = 0; l <= G.L(); ++l)
    for (int a = 0; a < G.side(); ++a)
      for (int b = 0; b < G.side(); ++b) {
        if (G.cls(a, b) == NodeClass::interior) continue;
        const double x = G.x(a), y = G.x(b), r = std::hypot(x, y);
        u[G.index(a, b, l, 0)] = x / r;
        u[G.index(a, b, l, 1)] = y / r;
        u[G.index(a, b, l, 2)] = 0.0;
      }
}

/// Energy and (optionally) its gradient; the gradient is zero off the interior.
inline double field_energy(const Potential& W, const CylinderGrid& G, double eps,
                           const std::vector<double>& u, std::vector<double>* grad) {
  const int n = G.side();
  const double h2 = G.hx() * G.hx();
  const double hz = G.hz();
  const double inv_eps2 = 1.0 / (eps * eps);
  if (grad) grad->assign(u.size(), 0.0);
  double E = 0.0;
  for (int l = 0; l <= G.L(); ++l) {
    const double wz = G.wz(l);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const NodeClass c = G.cls(a, b);
        if (c == NodeClass::exterior) continue;
        const std::size_t p = G.index(a, b, l);
        // xy edges to (a+1, b) and (a, b+1), kept if either end is interior
        for (int k = 0; k < 2; ++k) {
          const int a2 = a + (k == 0), b2 = b + (k == 1);
          if (a2 >= n || b2 >= n) continue;
          const NodeClass c2 = G.cls(a2, b2);
          if (c != NodeClass::interior && c2 != NodeClass::interior) continue;
          const std::size_t q = G.index(a2, b2, l);
          for (int m = 0; m < 3; ++m) {
            const double d = u[q + m] - u[p + m];
            E += 0.5 * wz * d * d;
            if (grad) {
              (*grad)[q + m] += wz * d;
              (*grad)[p + m] -= wz * d;
            }
          }
        }
        if (c != NodeClass::interior) continue;
        if (l < G.L()) {
          const std::size_t q = G.index(a, b, l + 1);
          for (int m = 0; m < 3; ++m) {
            const double d = u[q + m] - u[p + m];
            E += 0.5 * h2 / hz * d * d;
            if (grad) {
              (*grad)[q + m] += h2 / hz * d;
              (*grad)[p + m] -= h2 / hz * d;
            }
          }
        }
        const double m2 = u[p] * u[p] + u[p + 1] * u[p + 1] + u[p + 2] * u[p + 2];
        const PotentialValue pv = W(1.0 - m2);
        E += 0.5 * h2 * wz * inv_eps2 * pv.W;
        if (grad)
          for (int m = 0; m < 3; ++m) (*grad)[p + m] -= h2 * wz * inv_eps2 * pv.Wp * u[p + m];
      }
  }
  if (grad) {
    for (int l = 0; l <= G.L(); ++l)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          if (G.cls(a, b) != NodeClass::interior)
            for (int m = 0; m < 3; ++m) (*grad)[G.index(a, b, l, m)] = 0.0;
  }
  return E;
}

/// Max over interior nodes of |gradient| / (node volume).
inline double field_residual(const CylinderGrid& G, const std::vector<double>& grad) {
  const double h2 = G.hx() * G.hx();
  double r = 0.0;
  for (int l = 0; l <= G.L(); ++l) {
    const double vol = h2 * G.wz(l);
    for (int a = 0; a < G.side(); ++a)
      for (int b = 0; b < G.side(); ++b)
        for (int m = 0; m < 3; ++m) r = std::max(r, std::abs(grad[G.index(a, b, l, m)]) / vol);
  }
  return r;
}

}  // namespace detail

inline double field_energy(const Potential& W, const FieldState& s) {
  return detail::field_energy(W, s.grid, s.epsilon, s.values, nullptr);
}

/// u(x, z) = (f(|x|) x/|x|, g(|x|)) with linear interpolation of the radial samples.
inline FieldState z_invariant_embed(const CylinderGrid& G, const ProfilePair& pair, double eps) {
  FieldState s{G};
  s.epsilon = eps;
  s.values.assign(G.node_count() * 3, 0.0);
  const std::size_t J = pair.grid.intervals();
  for (int a = 0; a < G.side(); ++a)
    for (int b = 0; b < G.side(); ++b) {
      if (G.cls(a, b) != NodeClass::interior) continue;
      const double x = G.x(a), y = G.x(b), r = std::hypot(x, y);
      const double pos = r * J;
      const std::size_t i = std::min(static_cast<std::size_t>(pos), J - 1);
      const double t = pos - i;
      const double f = (1 - t) * pair.f[i] + t * pair.f[i + 1];
      const double g = (1 - t) * pair.g[i] + t * pair.g[i + 1];
      const double ex = r > 0 ? x / r : 0.0, ey = r > 0 ? y / r : 0.0;
      for (int l = 0; l <= G.L(); ++l) {
        s.values[G.index(a, b, l, 0)] = f * ex;
        s.values[G.index(a, b, l, 1)] = f * ey;
        s.values[G.index(a, b, l, 2)] = g;
      }
    }
  detail::apply_boundary(G, s.values);
  return s;
}

/// Interior values drawn uniformly from [-1/2, 1/2]^3.
inline FieldState random_field(const CylinderGrid& G, double eps, std::uint64_t seed) {
  FieldState s{G};
  s.epsilon = eps;
  s.seed = seed;
  s.values.assign(G.node_count() * 3, 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  for (double& v : s.values) v = U(rng);
  detail::apply_boundary(G, s.values);
  return s;
}

/// Nesterov-accelerated gradient descent. The step starts at the inverse
/// Gershgorin bound of the stiffness part and backtracks if the potential
/// term needs more; momentum restarts when the step opposes the gradient or
/// the energy rises. Energy comparisons allow a rounding-level slack so the
/// iteration keeps going once energy differences fall below 1e-13 relative.
/// Lateral Dirichlet values are never touched.
inline FieldState minimize_full_energy(const Potential& W, FieldState s,
                                       const OracleOptions& opts = {}) {
  const CylinderGrid& G = s.grid;
  if (!(s.epsilon > 0.0)) throw DomainError("epsilon must be positive");
  const double eps = s.epsilon;
  constexpr int kCheckEvery = 10;
  std::vector<double> x = s.values, x_prev = x, y = x, gy, gx, trial(x.size());
  double Ex = detail::field_energy(W, G, eps, x, &gx);
  const double step_max = 1.0 / (2.0 * (4.0 * G.hz() + 2.0 * G.hx() * G.hx() / G.hz()));
  double step = step_max;
  double t = 1.0;
  int increases = 0;
  auto slack = [](double E) { return 1e-13 * std::max(1.0, std::abs(E)); };
  s.residual = detail::field_residual(G, gx);
  for (s.iterations = 0; s.iterations < opts.max_iterations; ++s.iterations) {
    if (s.iterations % kCheckEvery == 0) {
      detail::field_energy(W, G, eps, x, &gx);
      s.residual = detail::field_residual(G, gx);
      if (s.residual < opts.tolerance) break;
    }
    const double Ey = detail::field_energy(W, G, eps, y, &gy);
    double gg = 0.0;
    for (double v : gy) gg += v * v;
    double Et = 0.0;
    for (int k = 0;; ++k) {
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = y[i] - step * gy[i];
      Et = detail::field_energy(W, G, eps, trial, nullptr);
      if (Et <= Ey - 0.5 * step * gg + slack(Ey)) break;
      step *= 0.5;
      if (k > 60) throw DivergenceError("full-field step size collapsed");
    }
    if (!std::isfinite(Et)) throw NumericalError("non-finite full-field energy");
    if (Et > Ex + slack(Ex)) {
      // momentum overshoot: restart from the last accepted point
      if (++increases >= 10) throw DivergenceError("energy increased across 10 successive steps");
      y = x;
      t = 1.0;
      continue;
    }
    increases = 0;
    double opposing = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) opposing += gy[i] * (trial[i] - x[i]);
    x_prev.swap(x);
    x.swap(trial);
    Ex = Et;
    if (opposing > 0.0) t = 1.0;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + beta * (x[i] - x_prev[i]);
    t = t_next;
    step = std::min(step * 1.05, step_max);
  }
  detail::field_energy(W, G, eps, x, &gx);
  s.residual = detail::field_residual(G, gx);
  s.values = std::move(x);
  s.energy = detail::field_energy(W, G, eps, s.values, nullptr);
  return s;
}

namespace detail {

/// Weighted z-mean of every column, formed as layer 0 plus the mean offset so
/// that z-constant columns reproduce their value exactly.
inline std::vector<std::array<double, 3>> z_average(const FieldState& s) {
  const CylinderGrid& G = s.grid;
  std::vector<std::array<double, 3>> avg(G.plane(), {0, 0, 0});
  for (int a = 0; a < G.side(); ++a)
    for (int b = 0; b < G.side(); ++b)
      for (int m = 0; m < 3; ++m) {
        const double base = s.values[G.index(a, b, 0, m)];
        double offset = 0.0;
        for (int l = 1; l <= G.L(); ++l) offset += G.wz(l) * (s.values[G.index(a, b, l, m)] - base);
        avg[a * G.side() + b][m] = base + offset;
      }
  return avg;
}

}  // namespace detail

/// Max over interior nodes of |u(x, z) - mean_z u(x, .)|.
inline double z_invariance_deviation(const FieldState& s) {
  const CylinderGrid& G = s.grid;
  const auto avg = detail::z_average(s);
  double dev = 0.0;
  for (int a = 0; a < G.side(); ++a)
    for (int b = 0; b < G.side(); ++b) {
      if (G.cls(a, b) != NodeClass::interior) continue;
      const auto& mean = avg[a * G.side() + b];
      for (int l = 0; l <= G.L(); ++l) {
        double d2 = 0.0;
        for (int m = 0; m < 3; ++m) {
          const double d = s.values[G.index(a, b, l, m)] - mean[m];
          d2 += d * d;
        }
        dev = std::max(dev, std::sqrt(d2));
      }
    }
  return dev;
}

/// After z-averaging, groups interior nodes into lattice shells of equal
/// radius and returns the largest spread of |u_planar| or u_3 within a shell,
/// or the largest misalignment |u_planar - |u_planar| x/|x||, whichever is larger.
inline double radial_symmetry_deviation(const FieldState& s) {
  const CylinderGrid& G = s.grid;
  const auto avg = detail::z_average(s);
  const int c = G.K() / 2;
  struct Range {
    double pmin = INFINITY, pmax = -INFINITY, zmin = INFINITY, zmax = -INFINITY;
  };
  std::map<int, Range> shells;
  double align = 0.0;
  for (int a = 0; a < G.side(); ++a)
    for (int b = 0; b < G.side(); ++b) {
      if (G.cls(a, b) != NodeClass::interior) continue;
      const auto& u = avg[a * G.side() + b];
      const double p = std::hypot(u[0], u[1]);
      Range& rg = shells[(a - c) * (a - c) + (b - c) * (b - c)];
      rg.pmin = std::min(rg.pmin, p);
      rg.pmax = std::max(rg.pmax, p);
      rg.zmin = std::min(rg.zmin, u[2]);
      rg.zmax = std::max(rg.zmax, u[2]);
      const double x = G.x(a), y = G.x(b), r = std::hypot(x, y);
      if (r > 0) align = std::max(align, std::hypot(u[0] - p * x / r, u[1] - p * y / r));
    }
  double spread = 0.0;
  for (const auto& [k, rg] : shells)
    spread = std::max({spread, rg.pmax - rg.pmin, rg.zmax - rg.zmin});
  return std::max(spread, align);
}

struct ThirdComponentRange {
  double min = 0.0, max = 0.0;
};

inline ThirdComponentRange third_component_range(const FieldState& s) {
  const CylinderGrid& G = s.grid;
  ThirdComponentRange out{INFINITY, -INFINITY};
  for (int l = 0; l <= G.L(); ++l)
    for (int a = 0; a < G.side(); ++a)
      for (int b = 0; b < G.side(); ++b) {
        if (G.cls(a, b) != NodeClass::interior) continue;
        const double v = s.values[G.index(a, b, l, 2)];
        out.min = std::min(out.min, v);
        out.max = std::max(out.max, v);
      }
  return out;
}

/// Applies the element of O(3) fixing R^2 x {0} nearest to a rotation by
/// `angle` about that plane (identity or u_3 -> -u_3).
inline FieldState reflect_third_component(const FieldState& s, double angle = M_PI) {
  FieldState r = s;
  if (std::cos(angle) < 0.0)
    for (std::size_t i = 2; i < r.values.size(); i += 3)
      if (r.values[i] != 0.0) r.values[i] = -r.values[i];  // keep +0.0 fixed bitwise
  return r;
}

/// |E(state) - E(R state)| for the stabilizer element selected by `angle`.
inline double rotation_energy_invariance(const Potential& W, const FieldState& s, double angle) {
  return std::abs(field_energy(W, s) - field_energy(W, reflect_third_component(s, angle)));
}

inline double field_gradient_residual(const Potential& W, const FieldState& s) {
  std::vector<double> g;
  detail::field_energy(W, s.grid, s.epsilon, s.values, &g);
  return detail::field_residual(s.grid, g);
}

/// "GLF1", K, L, M as int32 LE, then float64 LE values: z outermost, then x,
/// then y, then component.
inline void write_field_binary(const FieldState& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  auto put_le = [&](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    unsigned char buf[8];
    for (std::size_t i = 0; i < n; ++i) buf[i] = b[i];
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + n);
    out.write(reinterpret_cast<const char*>(buf), static_cast<std::streamsize>(n));
  };
  out.write("GLF1", 4);
  const std::int32_t hdr[3] = {s.grid.K(), s.grid.L(), CylinderGrid::M};
  for (std::int32_t v : hdr) put_le(&v, 4);
  for (double v : s.values) put_le(&v, 8);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace glv
