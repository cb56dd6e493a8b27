#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "glvortex/harmonic.hpp"

using namespace glv;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

ThetaProfile closed_form(const RadialGrid& grid) {
  ThetaProfile t{grid};
  for (std::size_t i = 0; i < grid.size(); ++i) t.theta.push_back(2.0 * std::atan(grid.r(i)));
  t.theta.back() = kHalfPi;
  return t;
}

}  // namespace

TEST(Harmonic, PlanarClosedForm) {
  const RadialGrid grid(2, 512);
  const ThetaProfile t = solve_harmonic_theta(2, grid, HarmonicSeed::escaping_seed);
  double err = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    err = std::max(err, std::abs(t.theta[i] - 2.0 * std::atan(grid.r(i))));
  EXPECT_LT(err, 1e-3);
  EXPECT_NEAR(harmonic_energy(t), 1.0, 1e-3);
  EXPECT_TRUE(t.escaping_flag);
}

TEST(Harmonic, ClosedFormResidual) {
  const RadialGrid grid(2, 512);
  EXPECT_LT(harmonic_residual(2, closed_form(grid)), 1e-4);
  // a wrong profile has a visible residual
  ThetaProfile bad{grid};
  for (std::size_t i = 0; i < grid.size(); ++i) bad.theta.push_back(kHalfPi * grid.r(i));
  EXPECT_GT(harmonic_residual(2, bad), 1e-2);
}

TEST(Harmonic, ResidualShrinksUnderRefinement) {
  const double coarse = harmonic_residual(2, closed_form(RadialGrid(2, 128)));
  const double fine = harmonic_residual(2, closed_form(RadialGrid(2, 256)));
  // off-centred stencils next to the origin cap the observed order near 3
  EXPECT_GT(coarse / fine, 6.0);
}

TEST(Harmonic, ProfileInvariants) {
  for (int N : {2, 4, 7}) {
    const RadialGrid grid(N, 256);
    const ThetaProfile t = solve_harmonic_theta(N, grid, HarmonicSeed::escaping_seed);
    EXPECT_EQ(t.theta.back(), kHalfPi);
    const ProfilePair p = t.to_pair();
    EXPECT_EQ(p.f.back(), 1.0);
    EXPECT_EQ(p.g.back(), 0.0);
    EXPECT_TRUE(p.is_limit());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      EXPECT_GE(t.theta[i], 0.0);
      EXPECT_LE(t.theta[i], kHalfPi);
      EXPECT_NEAR(p.f[i] * p.f[i] + p.g[i] * p.g[i], 1.0, 4e-16);
    }
  }
}

TEST(Harmonic, EscapingBeatsEquatorBelowSeven) {
  for (int N = 3; N <= 6; ++N) {
    const RadialGrid grid(N, 512);
    const ThetaProfile t = solve_harmonic_theta(N, grid, HarmonicSeed::escaping_seed);
    EXPECT_LT(harmonic_energy(t), equator_energy(N)) << N;
    EXPECT_LT(equator_instability_probe(N, grid), 0.0) << N;
  }
}

TEST(Harmonic, EquatorMinimizesFromSeven) {
  for (int N : {7, 8}) {
    const RadialGrid grid(N, 512);
    for (auto seed : {HarmonicSeed::escaping_seed, HarmonicSeed::equator_seed}) {
      const ThetaProfile t = solve_harmonic_theta(N, grid, seed);
      EXPECT_GE(harmonic_energy(t), equator_energy(N) - 1e-3) << N;
    }
    EXPECT_GT(equator_instability_probe(N, grid), 0.0) << N;
  }
}

TEST(Harmonic, EquatorSeedIsCritical) {
  const RadialGrid grid(3, 128);
  const ThetaProfile t = solve_harmonic_theta(3, grid, HarmonicSeed::equator_seed);
  for (double v : t.theta) EXPECT_EQ(v, kHalfPi);
  EXPECT_FALSE(t.escaping_flag);
  EXPECT_EQ(harmonic_residual(3, t), 0.0);
}

TEST(Harmonic, EquatorEnergyValues) {
  EXPECT_DOUBLE_EQ(equator_energy(7), 0.6);
  EXPECT_DOUBLE_EQ(equator_energy(3), 1.0);
  EXPECT_THROW(equator_energy(2), DivergentEnergy);
}

TEST(Harmonic, RejectsBadDimension) {
  const RadialGrid grid(3, 64);
  EXPECT_THROW(solve_harmonic_theta(2, grid, HarmonicSeed::escaping_seed), SizingError);
  EXPECT_THROW(solve_harmonic_theta(1, grid, HarmonicSeed::escaping_seed), SizingError);
  EXPECT_THROW(equator_instability_probe(2, grid), SizingError);
}
