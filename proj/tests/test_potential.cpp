#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "glvortex/potential.hpp"

using namespace glv;

TEST(Potential, QuadraticValues) {
  auto W = Potential::quadratic();
  auto a = W(0.0);
  EXPECT_EQ(a.W, 0.0);
  EXPECT_EQ(a.Wp, 0.0);
  EXPECT_EQ(a.Wpp, 1.0);
  auto b = eval_potential(W, 1.0);
  EXPECT_EQ(b.W, 0.5);
  EXPECT_EQ(b.Wp, 1.0);
  auto c = W(-2.0);
  EXPECT_EQ(c.W, 2.0);
  EXPECT_EQ(c.Wp, -2.0);
  EXPECT_EQ(c.Wpp, 1.0);
}

TEST(Potential, DomainError) {
  auto W = Potential::quadratic();
  EXPECT_THROW(W(1.0 + 1e-12), DomainError);
  EXPECT_THROW(W(NAN), DomainError);
}

TEST(Potential, ValidationReports) {
  auto ok = validate_potential(Potential::quadratic(), 1000);
  EXPECT_TRUE(ok.all_passed());
  ASSERT_NE(ok.find("strict_convexity"), nullptr);

  auto linear = Potential::from_function(
      "t", [](double t) { return PotentialValue{t, 1.0, 0.0}; }, false);
  auto r1 = validate_potential(linear, 200);
  const auto* pos = r1.find("positivity");
  ASSERT_NE(pos, nullptr);
  EXPECT_FALSE(pos->passed);
  ASSERT_TRUE(pos->witness.has_value());
  EXPECT_LT(*pos->witness, 0.0);

  auto quartic = Potential::from_function(
      "t^4", [](double t) { return PotentialValue{t * t * t * t, 4 * t * t * t, 12 * t * t}; },
      true);
  auto r2 = validate_potential(quartic, 200);
  const auto* strict = r2.find("strict_convexity");
  ASSERT_NE(strict, nullptr);
  EXPECT_FALSE(strict->passed);
  EXPECT_EQ(*strict->witness, 0.0);
  EXPECT_TRUE(r2.find("convexity")->passed);

  EXPECT_THROW(validate_potential(Potential::quadratic(), 99), SizingError);
}

TEST(Potential, FiniteDifferenceDerivative) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 0.9);
  const double h = 1e-4;
  for (const auto& W : {Potential::quadratic(),
                        Potential::from_function(
                            "exp", [](double t) {
                              return PotentialValue{std::exp(t) - 1 - t, std::exp(t) - 1,
                                                    std::exp(t)};
                            },
                            true)}) {
    for (int k = 0; k < 50; ++k) {
      const double t = U(rng);
      const double fd = (W(t + h).W - W(t - h).W) / (2 * h);
      EXPECT_NEAR(fd, W(t).Wp, 1e-7);
    }
  }
}

TEST(Potential, ConvexityInequality) {
  auto W = Potential::quadratic();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-3.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double a = U(rng), b = U(rng);
    EXPECT_GE(W(b).W - W(a).W, W(a).Wp * (b - a) - 1e-14);
  }
}

TEST(Potential, TabulatedMatchesQuadratic) {
  std::vector<double> t, w, wp;
  for (int k = 0; k <= 80; ++k) {
    const double x = -3.0 + 4.0 * k / 80;
    t.push_back(x);
    w.push_back(0.5 * x * x);
    wp.push_back(x);
  }
  auto T = Potential::tabulated(t, w, wp, true);
  EXPECT_EQ(T.kind(), PotentialKind::user_tabulated);
  for (double x : {-2.7, -1.0, 0.0, 0.33, 0.999}) {
    EXPECT_NEAR(T(x).W, 0.5 * x * x, 1e-12);
    EXPECT_NEAR(T(x).Wp, x, 1e-12);
    EXPECT_NEAR(T(x).Wpp, 1.0, 1e-9);
  }
  EXPECT_THROW(T(-3.5), DomainError);
  EXPECT_TRUE(validate_potential(T, 400).all_passed());

  const auto path = std::filesystem::temp_directory_path() / "glv_potential.csv";
  {
    std::ofstream out(path);
    out << "t,W,Wp\n";
    for (std::size_t i = 0; i < t.size(); ++i) out << t[i] << ',' << w[i] << ',' << wp[i] << '\n';
  }
  auto L = Potential::load_csv(path.string(), true);
  EXPECT_NEAR(L(0.5).W, 0.125, 1e-12);
  std::filesystem::remove(path);
}
