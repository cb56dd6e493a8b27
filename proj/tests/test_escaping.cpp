#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "glvortex/escaping.hpp"

using namespace glv;

namespace {

const Potential W = Potential::quadratic();

struct TwoD {
  RadialGrid grid{2, 512};
  double eps_N = find_epsilon_N(W, 2, grid, 1e-9);
};

const TwoD& two_d() {
  static const TwoD s;
  return s;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// v^T H v over unknowns (f_1..f_{J-1}, g_0..g_{J-1}) using the 2x2 block layout.
double hessian_quadratic(const detail::BlockHessian& H, const std::vector<double>& df,
                         const std::vector<double>& dg) {
  const std::size_t J = H.diag.size();
  double q = 0.0;
  auto blk = [&](const linalg::Block& B, std::size_t i, std::size_t k) {
    return df[i] * (B[0] * df[k] + B[1] * dg[k]) + dg[i] * (B[2] * df[k] + B[3] * dg[k]);
  };
  for (std::size_t i = 0; i < J; ++i) {
    q += blk(H.diag[i], i, i);
    if (i + 1 < J) q += blk(H.upper[i], i, i + 1);
    if (i > 0) q += blk(H.lower[i], i, i - 1);
  }
  return q;
}

}  // namespace

TEST(Escaping, HalfThresholdEscapes) {
  const auto& s = two_d();
  const double eps = 0.5 * s.eps_N;
  const EscapeResult r = solve_escaping_profile(W, s.grid, eps);
  ASSERT_TRUE(r.escaped);
  EXPECT_GT(r.pair.g.front(), 0.5);
  const ProfilePair base = solve_nonescaping_profile(W, s.grid, eps);
  EXPECT_LT(r.energy.total, energy_I(W, base).total);
  EXPECT_LT(escaping_residual(W, r), 1e-6);
}

TEST(Escaping, ProfileShape) {
  const auto& s = two_d();
  const EscapeResult r = solve_escaping_profile(W, s.grid, 0.5 * s.eps_N);
  ASSERT_TRUE(r.escaped);
  const auto& f = r.pair.f;
  const auto& g = r.pair.g;
  const std::size_t J = s.grid.intervals();
  EXPECT_EQ(f.front(), 0.0);
  EXPECT_EQ(f.back(), 1.0);
  EXPECT_EQ(g.back(), 0.0);
  for (std::size_t i = 1; i < J; ++i) {
    EXPECT_GT(g[i], 0.0);
    EXPECT_LT(f[i] * f[i] + g[i] * g[i], 1.0);
    EXPECT_GT(f[i + 1], f[i]);
    EXPECT_LT(g[i + 1], g[i]);
  }
  // g_0 against the quadratic extrapolation of the next nodes
  const double extrap = 3 * g[1] - 3 * g[2] + g[3];
  EXPECT_LT(std::abs(g[0] - extrap), 1.0 / J);
}

TEST(Escaping, InitializationsAgree) {
  const auto& s = two_d();
  const double eps = 0.5 * s.eps_N;
  const EscapeResult a = solve_escaping_profile(W, s.grid, eps, {}, EscapeInit::eigenfunction_bump);
  const EscapeResult b = solve_escaping_profile(W, s.grid, eps, {}, EscapeInit::linear_bump);
  const EscapeResult c = solve_escaping_profile(W, s.grid, eps, {}, EscapeInit::random_bump);
  ASSERT_TRUE(a.escaped && b.escaped && c.escaped);
  EXPECT_LT(max_diff(a.pair.f, b.pair.f), 1e-6);
  EXPECT_LT(max_diff(a.pair.g, b.pair.g), 1e-6);
  EXPECT_LT(max_diff(a.pair.f, c.pair.f), 1e-6);
  EXPECT_LT(max_diff(a.pair.g, c.pair.g), 1e-6);
}

TEST(Escaping, SignSymmetry) {
  const auto& s = two_d();
  const double eps = 0.5 * s.eps_N;
  const EscapeResult r = solve_escaping_profile(W, s.grid, eps);
  std::vector<double> neg(r.pair.g);
  for (double& v : neg) v = -v;
  EXPECT_EQ(detail::radial_energy_total(W, s.grid, r.pair.f, r.pair.g, eps),
            detail::radial_energy_total(W, s.grid, r.pair.f, neg, eps));
}

TEST(Escaping, AboveThresholdMatchesBase) {
  const auto& s = two_d();
  const double eps = 2.0 * s.eps_N;
  SolverOptions opts;
  const EscapeResult r = solve_escaping_profile(W, s.grid, eps, opts);
  EXPECT_FALSE(r.escaped);
  EXPECT_LE(detail::max_abs(r.pair.g), opts.escape_threshold);
  const ProfilePair base = solve_nonescaping_profile(W, s.grid, eps, opts);
  EXPECT_LT(max_diff(r.pair.f, base.f), 10 * opts.tolerance);
}

TEST(Escaping, HighDimensionNeverEscapes) {
  const RadialGrid grid(7, 256);
  for (double eps : {0.05, 0.5})
    for (auto init : {EscapeInit::eigenfunction_bump, EscapeInit::linear_bump,
                      EscapeInit::random_bump})
      EXPECT_FALSE(solve_escaping_profile(W, grid, eps, {}, init).escaped) << eps;
}

TEST(Escaping, ResidualOfBasePair) {
  const auto& s = two_d();
  const double eps = 0.5 * s.eps_N;
  const ProfilePair base = solve_nonescaping_profile(W, s.grid, eps);
  EXPECT_LT(escaping_residual(W, base), 1e-9);
  std::vector<double> rf, rg;
  detail::ode_residual(W, s.grid, base.f, base.g, eps, rf, rg);
  EXPECT_EQ(detail::max_abs(rg), 0.0);
  ProfilePair bad(s.grid, base.f, std::vector<double>(s.grid.size(), 0.1), eps);
  EXPECT_THROW(escaping_residual(W, bad), BoundaryViolation);
}

TEST(Escaping, GapShrinksTowardThreshold) {
  const auto& s = two_d();
  auto gap = [&](double eps) {
    const EscapeResult r = solve_escaping_profile(W, s.grid, eps);
    EXPECT_TRUE(r.escaped) << eps;
    return energy_I(W, solve_nonescaping_profile(W, s.grid, eps)).total - r.energy.total;
  };
  const double near = gap(0.99 * s.eps_N);
  const double far = gap(0.5 * s.eps_N);
  EXPECT_GT(near, 0.0);
  EXPECT_LT(near, far);
}

TEST(Escaping, SecondVariationNonnegative) {
  const auto& s = two_d();
  const double eps = 0.5 * s.eps_N;
  const EscapeResult r = solve_escaping_profile(W, s.grid, eps);
  ASSERT_TRUE(r.escaped);
  const auto H = detail::radial_hessian(W, s.grid, r.pair.f, r.pair.g, eps);
  const std::size_t J = s.grid.intervals();
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = INFINITY;
  for (int probe = 0; probe < 50; ++probe) {
    std::vector<double> df(J), dg(J);
    const double a = n(rng), b = n(rng), k = 1 + probe % 7;
    double norm = 0.0;
    for (std::size_t i = 0; i < J; ++i) {
      const double x = s.grid.r(i);
      // mix smooth modes and node noise
      df[i] = i == 0 ? 0.0 : a * std::sin(k * M_PI * x) + 0.1 * n(rng);
      dg[i] = b * std::cos(0.5 * k * M_PI * x) + 0.1 * n(rng);
      norm += s.grid.w(i) * (df[i] * df[i] + dg[i] * dg[i]);
    }
    worst = std::min(worst, hessian_quadratic(H, df, dg) / norm);
  }
  EXPECT_GE(worst, -1e-6);
}

TEST(Escaping, CoreRisesAsEpsilonShrinks) {
  const RadialGrid grid(2, 256);
  const double eN = find_epsilon_N(W, 2, grid);
  double prev = 0.0;
  for (double factor : {0.9, 0.5, 0.25, 0.125}) {
    const EscapeResult r = solve_escaping_profile(W, grid, factor * eN);
    ASSERT_TRUE(r.escaped);
    EXPECT_GT(r.pair.g.front(), prev) << factor;
    EXPECT_LT(r.pair.g.front(), 1.0);
    prev = r.pair.g.front();
  }
}

TEST(Escaping, RejectsBadInput) {
  const RadialGrid grid(2, 64);
  EXPECT_THROW(solve_escaping_profile(W, grid, 0.0), DomainError);
  EXPECT_THROW(solve_escaping_profile(W, grid, -1.0), DomainError);
}

TEST(Dichotomy, SingleFlipAtThreshold) {
  const RadialGrid grid(2, 256);
  const double eN = find_epsilon_N(W, 2, grid);
  const auto eps = log_spaced(eN / 8, 4 * eN, 12);
  const DichotomyReport rep = classify_dichotomy(W, 2, grid, eps);
  ASSERT_EQ(rep.rows.size(), 12u);
  EXPECT_NEAR(rep.epsilon_N, eN, 1e-6);
  int flips = 0;
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    const auto& row = rep.rows[k];
    EXPECT_FALSE(row.error.has_value());
    EXPECT_EQ(row.escaped, row.epsilon < rep.epsilon_N) << row.epsilon;
    if (row.escaped) {
      ASSERT_TRUE(row.I_escaping.has_value());
      EXPECT_GT(row.energy_gap, 0.0);
      EXPECT_EQ(row.classification, "escaping");
    } else {
      EXPECT_LT(std::abs(row.energy_gap), 1e-8);
      EXPECT_EQ(row.classification, "non-escaping");
    }
    if (k > 0 && row.escaped != rep.rows[k - 1].escaped) ++flips;
  }
  EXPECT_EQ(flips, 1);
}

TEST(Dichotomy, MarginalNearThreshold) {
  const RadialGrid grid(2, 128);
  const double eN = find_epsilon_N(W, 2, grid, 1e-3);
  const DichotomyReport rep = classify_dichotomy(W, 2, grid, {eN}, {}, 1e-3);
  EXPECT_EQ(rep.rows.at(0).classification, "marginal");
}

TEST(Dichotomy, LogSpacing) {
  const auto v = log_spaced(1.0, 100.0, 3);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_DOUBLE_EQ(v[0], 1.0);
  EXPECT_NEAR(v[1], 10.0, 1e-12);
  EXPECT_NEAR(v[2], 100.0, 1e-12);
}
