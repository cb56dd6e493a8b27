#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "glvortex/forms.hpp"
#include "glvortex/spectral.hpp"

using namespace glv;

namespace {

const Potential W = Potential::quadratic();

// smooth bump vanishing to first order at 0 and at 1
TestFunction smooth_bump(const RadialGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double a = U(rng), b = U(rng), c = U(rng);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.r(i);
    v[i] = r * r * (1 - r) * (a + b * r + c * std::cos(3 * r));
  }
  v.back() = 0.0;
  return TestFunction(g, v);
}

TestFunction random_dirichlet(const RadialGrid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(g.size());
  for (double& x : v) x = n(rng);
  v.back() = 0.0;
  return TestFunction(g, v);
}

struct Setup {
  RadialGrid grid{2, 512};
  double eps_N = find_epsilon_N(W, 2, grid);
  double eps = 0.5 * eps_N;
  LinearizedSpectrum ls = linearized_spectrum(W, grid, eps);
};

const Setup& setup() {
  static const Setup s;
  return s;
}

}  // namespace

TEST(TestFunction, DirichletRequired) {
  RadialGrid g(2, 32);
  EXPECT_THROW(TestFunction(g, std::vector<double>(g.size(), 1.0)), BoundaryViolation);
  EXPECT_THROW(TestFunction(g, std::vector<double>(3, 0.0)), LengthMismatch);
}

TEST(Forms, RayleighIdentity) {
  const auto& s = setup();
  TestFunction psi(s.grid, s.ls.spectrum.eigenfunction);
  const double ell = s.ls.spectrum.eigenvalue;
  EXPECT_NEAR(evaluate_F(W, s.ls.profile, s.eps, psi), ell, 1e-6);
  auto zero = TestFunction::zero(s.grid);
  EXPECT_NEAR(evaluate_Q(W, s.ls.profile, s.eps, zero, psi), ell, 1e-6);
  EXPECT_LT(evaluate_Q(W, s.ls.profile, s.eps, zero, psi), 0.0);
  EXPECT_LT(evaluate_F(W, s.ls.profile, s.eps, psi), 0.0);
}

TEST(Forms, ZeroFunction) {
  const auto& s = setup();
  auto zero = TestFunction::zero(s.grid);
  EXPECT_EQ(evaluate_F(W, s.ls.profile, s.eps, zero), 0.0);
  EXPECT_EQ(evaluate_Q(W, s.ls.profile, s.eps, zero, zero), 0.0);
  EXPECT_EQ(hardy_margin(W, s.ls.profile, s.eps, zero), 0.0);
}

TEST(Forms, EpsilonMismatch) {
  const auto& s = setup();
  auto zero = TestFunction::zero(s.grid);
  EXPECT_THROW(evaluate_F(W, s.ls.profile, 2 * s.eps, zero), EpsilonMismatch);
}

TEST(Forms, BilinearityAndConsistency) {
  const auto& s = setup();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  auto zero = TestFunction::zero(s.grid);
  for (int k = 0; k < 5; ++k) {
    auto a = random_dirichlet(s.grid, rng), b = random_dirichlet(s.grid, rng);
    const double sc = U(rng);
    std::vector<double> as = a.values(), bs = b.values();
    for (double& x : as) x *= sc;
    for (double& x : bs) x *= sc;
    const double q = evaluate_Q(W, s.ls.profile, s.eps, a, b);
    const double qs =
        evaluate_Q(W, s.ls.profile, s.eps, TestFunction(s.grid, as), TestFunction(s.grid, bs));
    EXPECT_NEAR(qs, sc * sc * q, 1e-10 * std::abs(sc * sc * q));
    EXPECT_NEAR(evaluate_Q(W, s.ls.profile, s.eps, zero, b), evaluate_F(W, s.ls.profile, s.eps, b),
                1e-12 * std::abs(evaluate_F(W, s.ls.profile, s.eps, b)));
  }
}

TEST(Forms, SpectralFloor) {
  const auto& s = setup();
  std::mt19937_64 rng(9);
  const double ell = s.ls.spectrum.eigenvalue;
  for (int k = 0; k < 10; ++k) {
    auto b = random_dirichlet(s.grid, rng);
    std::vector<double> b0 = b.values();
    b0[0] = b0[1];  // natural condition at the origin
    TestFunction bb(s.grid, b0);
    std::vector<double> sq(b0.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = b0[i] * b0[i];
    EXPECT_GE(evaluate_F(W, s.ls.profile, s.eps, bb), ell * integrate_radial(s.grid, sq) - 1e-8);
  }
}

TEST(Forms, SecondVariationMatchesEnergy) {
  const auto& s = setup();
  const auto& psi = s.ls.spectrum.eigenfunction;
  const double Q =
      evaluate_Q(W, s.ls.profile, s.eps, TestFunction::zero(s.grid), TestFunction(s.grid, psi));
  const double I0 = energy_I(W, s.ls.profile).total;
  double prev_err = 0;
  for (double t : {1e-2, 1e-3}) {
    ProfilePair p = s.ls.profile;
    for (std::size_t i = 0; i < psi.size(); ++i) p.g[i] = t * psi[i];
    const double dI = energy_I(W, p).total - I0;
    const double err = std::abs(dI - 0.5 * t * t * Q);
    EXPECT_LT(err, 1e-2 * t * t * std::abs(Q));
    if (prev_err > 0) EXPECT_LT(err, prev_err);
    prev_err = err;
  }
}

TEST(Hardy, SevenDimensionalMargin) {
  RadialGrid g(7, 512);
  std::mt19937_64 rng(13);
  for (double eps : {0.05, 0.1, 1.0}) {
    auto p = solve_nonescaping_profile(W, g, eps);
    for (int k = 0; k < 5; ++k) {
      auto psi = smooth_bump(g, rng);
      EXPECT_GE(hardy_margin(W, p, eps, psi), -1e-6);
      const double lower = 0.25 * hardy_integral(g, psi.values());
      EXPECT_GE(evaluate_F(W, p, eps, psi), lower - 1e-6);
    }
  }
}
