#pragma once

// Quadratic forms around the non-escaping profile (f_eps, 0):
//   F(psi)        = \int psi'^2 + V psi^2,          V = -W'(1 - f^2)/eps^2
//   Q(alpha,beta) = F(alpha) + F(beta) + \int [(N-1)/r^2 + 2 W''(1-f^2) f^2/eps^2] alpha^2
// All integrals carry the weight r^{N-1} and use the same staggered
// differences as the energy, so Q(0, psi) is exactly the discrete Hessian.

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "glvortex/error.hpp"
#include "glvortex/potential.hpp"
#include "glvortex/radial_grid.hpp"

namespace glv {

class TestFunction {
 public:
  TestFunction(RadialGrid grid, std::vector<double> values,
               std::optional<std::vector<double>> second = std::nullopt)
      : grid_(std::move(grid)), values_(std::move(values)), second_(std::move(second)) {
    check_length(grid_, values_.size());
    if (values_.back() != 0.0) throw BoundaryViolation("test function must vanish at r = 1");
    if (second_) {
      check_length(grid_, second_->size());
      if (second_->back() != 0.0) throw BoundaryViolation("test function must vanish at r = 1");
    }
  }

  static TestFunction zero(const RadialGrid& grid) {
    return TestFunction(grid, std::vector<double>(grid.size(), 0.0));
  }

  const RadialGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  const std::optional<std::vector<double>>& second() const { return second_; }

 private:
  RadialGrid grid_;
  std::vector<double> values_;
  std::optional<std::vector<double>> second_;
};

namespace detail {

inline void check_form_inputs(const ProfilePair& prof, double eps, const TestFunction& psi) {
  if (prof.is_limit()) throw DomainError("quadratic forms need a finite-epsilon profile");
  if (std::abs(*prof.epsilon - eps) > 1e-12 * eps) throw EpsilonMismatch(eps, *prof.epsilon);
  if (!prof.grid.same_as(psi.grid())) throw LengthMismatch(prof.grid.size(), psi.grid().size());
}

inline double dirichlet_part(const RadialGrid& grid, std::span<const double> psi) {
  const auto c = grid.cell_coefficients();
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < psi.size(); ++i) {
    const double d = psi[i + 1] - psi[i];
    s += c[i] * d * d;
  }
  return s;
}

inline double form_F(const Potential& W, const ProfilePair& prof, double eps,
                     std::span<const double> psi) {
  const auto w = prof.grid.weights();
  const double inv_eps2 = 1.0 / (eps * eps);
  double s = dirichlet_part(prof.grid, psi);
  for (std::size_t i = 1; i < psi.size(); ++i)
    s -= w[i] * inv_eps2 * W(1.0 - prof.f[i] * prof.f[i]).Wp * psi[i] * psi[i];
  return s;
}

}  // namespace detail

inline double evaluate_F(const Potential& W, const ProfilePair& f_profile, double eps,
                         const TestFunction& psi) {
  detail::check_form_inputs(f_profile, eps, psi);
  return detail::form_F(W, f_profile, eps, psi.values());
}

inline double evaluate_Q(const Potential& W, const ProfilePair& f_profile, double eps,
                         const TestFunction& alpha, const TestFunction& beta) {
  detail::check_form_inputs(f_profile, eps, alpha);
  detail::check_form_inputs(f_profile, eps, beta);
  const auto& a = alpha.values();
  const auto w = f_profile.grid.weights();
  const auto r = f_profile.grid.nodes();
  const int N = f_profile.grid.dimension();
  const double inv_eps2 = 1.0 / (eps * eps);
  double extra = 0.0;
  for (std::size_t i = 1; i < a.size(); ++i) {
    const double f = f_profile.f[i];
    const double wpp = W(1.0 - f * f).Wpp;
    extra += w[i] * ((N - 1) / (r[i] * r[i]) + 2.0 * inv_eps2 * wpp * f * f) * a[i] * a[i];
  }
  return detail::form_F(W, f_profile, eps, a) + detail::form_F(W, f_profile, eps, beta.values()) +
         extra;
}

/// \int psi^2 / r^2 r^{N-1} with zero weight at the origin.
inline double hardy_integral(const RadialGrid& grid, std::span<const double> psi) {
  const auto w = grid.weights();
  const auto r = grid.nodes();
  double s = 0.0;
  for (std::size_t i = 1; i < psi.size(); ++i) s += w[i] * psi[i] * psi[i] / (r[i] * r[i]);
  return s;
}

inline double hardy_margin(const Potential& W, const ProfilePair& f_profile, double eps,
                           const TestFunction& psi) {
  const int N = f_profile.grid.dimension();
  const double H = (N - 2.0) * (N - 2.0) / 4.0 - (N - 1.0);
  return evaluate_F(W, f_profile, eps, psi) - H * hardy_integral(f_profile.grid, psi.values());
}

}  // namespace glv
