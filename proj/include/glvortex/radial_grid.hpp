#pragma once

// Uniform radial mesh on [0,1] with r^{N-1} quadrature, plus the sampled
// profile pair shared by all radial solvers.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "glvortex/error.hpp"

namespace glv {

class RadialGrid {
 public:
  static constexpr int kMinIntervals = 16;

  /// Builds the mesh r_i = i/J, i = 0..J, for the ball B^N.
  RadialGrid(int N, int J) {
    if (N < 2) throw SizingError("dimension N must be >= 2, got " + std::to_string(N));
    if (J < kMinIntervals)
      throw SizingError("node count J must be >= 16, got " + std::to_string(J));
    auto d = std::make_shared<Data>();
    d->N = N;
    d->J = J;
    d->h = 1.0 / J;
    d->nodes.resize(J + 1);
    d->weights.resize(J + 1);
    d->cell.resize(J);
    for (int i = 0; i <= J; ++i) {
      d->nodes[i] = static_cast<double>(i) / J;
      d->weights[i] = d->h * std::pow(d->nodes[i], N - 1);
    }
    d->nodes[J] = 1.0;
    d->weights[0] = 0.0;
    // half weight at r = 1, minus the leading Euler-Maclaurin term of the
    // density r^{N-1}; w_0 stays 0 and sum(w) = 1/N to O(h^4) for N >= 3
    d->weights[J] = 0.5 * d->h - (N - 1) * d->h * d->h / 12.0;
    for (int i = 0; i < J; ++i) {
      d->cell[i] = std::pow((i + 0.5) * d->h, N - 1) / d->h;
    }
    d_ = std::move(d);
  }

  int dimension() const { return d_->N; }
  /// Number of intervals J; there are J+1 nodes.
  int intervals() const { return d_->J; }
  std::size_t size() const { return d_->nodes.size(); }
  double spacing() const { return d_->h; }

  std::span<const double> nodes() const { return d_->nodes; }
  /// End-corrected trapezoid weights for \int_0^1 u r^{N-1} dr; weights()[0] == 0.
  std::span<const double> weights() const { return d_->weights; }
  /// Staggered stiffness coefficients r_{i+1/2}^{N-1} / h, one per cell.
  std::span<const double> cell_coefficients() const { return d_->cell; }

  double r(std::size_t i) const { return d_->nodes[i]; }
  double w(std::size_t i) const { return d_->weights[i]; }

  bool same_as(const RadialGrid& o) const {
    return d_ == o.d_ || (d_->N == o.d_->N && d_->J == o.d_->J);
  }

 private:
  struct Data {
    int N = 0;
    int J = 0;
    double h = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> cell;
  };
  std::shared_ptr<const Data> d_;
};

inline RadialGrid build_grid(int N, int J) { return RadialGrid(N, J); }

inline void check_length(const RadialGrid& grid, std::size_t n) {
  if (n != grid.size()) throw LengthMismatch(grid.size(), n);
}

/// Weighted sum approximating \int_0^1 u(r) r^{N-1} dr.
inline double integrate_radial(const RadialGrid& grid, std::span<const double> samples) {
  check_length(grid, samples.size());
  const auto w = grid.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) s += w[i] * samples[i];
  return s;
}

/// Second-order differences: central inside, one-sided three-point at the ends.
inline std::vector<double> derivative_samples(const RadialGrid& grid,
                                              std::span<const double> samples) {
  check_length(grid, samples.size());
  const std::size_t J = grid.intervals();
  const double h = grid.spacing();
  std::vector<double> d(J + 1);
  d[0] = (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / (2.0 * h);
  for (std::size_t i = 1; i < J; ++i) d[i] = (samples[i + 1] - samples[i - 1]) / (2.0 * h);
  d[J] = (3.0 * samples[J] - 4.0 * samples[J - 1] + samples[J - 2]) / (2.0 * h);
  return d;
}

/// Sampled radial pair (f, g). An empty epsilon marks a harmonic-map (limit) profile.
struct ProfilePair {
  RadialGrid grid;
  std::vector<double> f;
  std::vector<double> g;
  std::optional<double> epsilon;

  ProfilePair(RadialGrid grid_, std::vector<double> f_, std::vector<double> g_,
              std::optional<double> eps)
      : grid(std::move(grid_)), f(std::move(f_)), g(std::move(g_)), epsilon(eps) {
    check_length(grid, f.size());
    check_length(grid, g.size());
  }

  /// Pair (f, 0) with g identically zero.
  static ProfilePair nonescaping(RadialGrid grid, std::vector<double> f, double eps) {
    std::vector<double> g(grid.size(), 0.0);
    return ProfilePair(std::move(grid), std::move(f), std::move(g), eps);
  }

  bool is_limit() const { return !epsilon.has_value(); }

  bool satisfies_boundary_data() const { return f.back() == 1.0 && g.back() == 0.0; }

  void require_boundary_data() const {
    if (!satisfies_boundary_data()) {
      std::ostringstream os;
      os.precision(17);
      os << "boundary data violated: f(1) = " << f.back() << ", g(1) = " << g.back()
         << " (need 1, 0)";
      throw BoundaryViolation(os.str());
    }
  }

  double max_modulus() const {
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::hypot(f[i], g[i]));
    return m;
  }
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Writes "r,f,g" with 17 significant digits and LF endings.
inline void write_profile_csv(const ProfilePair& pair, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "r,f,g\n";
  const auto r = pair.grid.nodes();
  for (std::size_t i = 0; i < r.size(); ++i) {
    out << detail::format_double(r[i]) << ',' << detail::format_double(pair.f[i]) << ','
        << detail::format_double(pair.g[i]) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

/// Reads a profile written by write_profile_csv back onto a grid of dimension N.
inline ProfilePair read_profile_csv(const std::string& path, int N, std::optional<double> eps) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line != "r,f,g") throw IoError("unexpected profile header in " + path + ": " + line);
  std::vector<double> f, g;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double r = 0, fv = 0, gv = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &r, &fv, &gv) != 3)
      throw IoError("malformed profile row in " + path + ": " + line);
    f.push_back(fv);
    g.push_back(gv);
  }
  if (f.size() < 2) throw IoError("profile " + path + " has no rows");
  RadialGrid grid(N, static_cast<int>(f.size()) - 1);
  return ProfilePair(std::move(grid), std::move(f), std::move(g), eps);
}

}  // namespace glv
