#pragma once

// The nonlinearity W on (-inf, 1] and checks of the standing hypotheses
// W(0) = 0, W > 0 away from 0, W convex.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "glvortex/error.hpp"

namespace glv {

struct PotentialValue {
  double W;
  double Wp;
  double Wpp;
};

enum class PotentialKind { quadratic_prototype, user_tabulated, user_function };

class Potential {
 public:
  using Eval = std::function<PotentialValue(double)>;

  /// W(t) = t^2 / 2.
  static Potential quadratic() {
    return Potential(
        PotentialKind::quadratic_prototype, "quadratic",
        [](double t) { return PotentialValue{0.5 * t * t, t, 1.0}; }, true, -INFINITY);
  }

  /// Analytic potential given by a callable returning (W, W', W'').
  static Potential from_function(std::string name, Eval eval, bool strictly_convex) {
    return Potential(PotentialKind::user_function, std::move(name), std::move(eval),
                     strictly_convex, -INFINITY);
  }

  /// Cubic-Hermite interpolant of tabulated (t, W, W') rows; t sorted ascending,
  /// last node must be t = 1. W'' comes from differentiating the interpolant.
  static Potential tabulated(std::vector<double> t, std::vector<double> W,
                             std::vector<double> Wp, bool strictly_convex,
                             std::string name = "tabulated") {
    if (t.size() != W.size() || t.size() != Wp.size())
      throw LengthMismatch(t.size(), std::min(W.size(), Wp.size()));
    if (t.size() < 2) throw SizingError("tabulated potential needs at least 2 rows");
    for (std::size_t i = 1; i < t.size(); ++i)
      if (!(t[i] > t[i - 1])) throw DomainError("tabulated t values must increase strictly");
    if (t.back() != 1.0) throw DomainError("tabulated potential must end at t = 1");
    auto table = std::make_shared<const Table>(Table{std::move(t), std::move(W), std::move(Wp)});
    const double lo = table->t.front();
    return Potential(
        PotentialKind::user_tabulated, std::move(name),
        [table](double x) { return table->eval(x); }, strictly_convex, lo);
  }

  /// Loads CSV rows "t,W,Wp" (header optional).
  static Potential load_csv(const std::string& path, bool strictly_convex) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open potential table " + path);
    std::vector<double> t, W, Wp;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      double a, b, c;
      char extra;
      if (std::sscanf(line.c_str(), "%lf,%lf,%lf%c", &a, &b, &c, &extra) != 3) {
        if (t.empty() && line.rfind("t", 0) == 0) continue;  // header
        throw IoError("malformed potential row: " + line);
      }
      t.push_back(a);
      W.push_back(b);
      Wp.push_back(c);
    }
    return tabulated(std::move(t), std::move(W), std::move(Wp), strictly_convex,
                     "tabulated:" + path);
  }

  PotentialKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  bool strictly_convex_flag() const { return strictly_convex_; }
  /// Smallest admissible argument (-inf unless tabulated).
  double lower_limit() const { return lower_; }

  PotentialValue operator()(double t) const {
    if (!(t <= 1.0)) {
      std::ostringstream os;
      os.precision(17);
      os << "potential evaluated at t = " << t << " outside (-inf, 1]";
      throw DomainError(os.str());
    }
    if (t < lower_) {
      std::ostringstream os;
      os.precision(17);
      os << "potential evaluated at t = " << t << " below table start " << lower_;
      throw DomainError(os.str());
    }
    return eval_(t);
  }

 private:
  struct Table {
    std::vector<double> t, W, Wp;

    PotentialValue eval(double x) const {
      auto it = std::upper_bound(t.begin(), t.end(), x);
      std::size_t k = (it == t.begin()) ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
      if (k + 1 >= t.size()) k = t.size() - 2;
      const double h = t[k + 1] - t[k];
      const double s = (x - t[k]) / h;
      const double y0 = W[k], y1 = W[k + 1], m0 = Wp[k] * h, m1 = Wp[k + 1] * h;
      // Hermite basis in s
      const double h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
      const double h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
      const double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
      const double d01 = -6 * s * s + 6 * s, d11 = 3 * s * s - 2 * s;
      const double e00 = 12 * s - 6, e10 = 6 * s - 4, e01 = -12 * s + 6, e11 = 6 * s - 2;
      return {h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1,
              (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / h,
              (e00 * y0 + e10 * m0 + e01 * y1 + e11 * m1) / (h * h)};
    }
  };

  Potential(PotentialKind kind, std::string name, Eval eval, bool strict, double lower)
      : kind_(kind), name_(std::move(name)), eval_(std::move(eval)), strictly_convex_(strict),
        lower_(lower) {}

  PotentialKind kind_;
  std::string name_;
  Eval eval_;
  bool strictly_convex_;
  double lower_;
};

inline PotentialValue eval_potential(const Potential& pot, double t) { return pot(t); }

struct HypothesisCheck {
  std::string name;
  bool passed = true;
  std::optional<double> witness;  // failing sample, if any
};

struct ValidationReport {
  std::vector<HypothesisCheck> checks;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
  const HypothesisCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Samples [-3, 1] (clipped to the table range) plus t = 0 and reports each
/// hypothesis. Failures are reported, never thrown.
inline ValidationReport validate_potential(const Potential& pot, int sample_count) {
  if (sample_count < 100) throw SizingError("validate_potential needs >= 100 samples");
  const double lo = std::max(-3.0, pot.lower_limit());
  std::vector<double> ts;
  ts.reserve(sample_count + 1);
  for (int k = 0; k < sample_count; ++k) ts.push_back(lo + (1.0 - lo) * k / (sample_count - 1));
  ts.push_back(0.0);
  std::sort(ts.begin(), ts.end());

  HypothesisCheck zero{"zero_at_origin"}, pos{"positivity"}, conv{"convexity"};
  const PotentialValue at0 = pot(0.0);
  if (at0.W != 0.0) {
    zero.passed = false;
    zero.witness = 0.0;
  }
  for (double t : ts) {
    const PotentialValue v = pot(t);
    if (t != 0.0 && !(v.W > 0.0) && pos.passed) {
      pos.passed = false;
      pos.witness = t;
    }
    if (!(v.Wpp >= 0.0) && conv.passed) {
      conv.passed = false;
      conv.witness = t;
    }
  }
  ValidationReport report;
  report.checks = {zero, pos, conv};
  if (pot.strictly_convex_flag()) {
    HypothesisCheck strict{"strict_convexity"};
    for (double t : ts) {
      if (!(pot(t).Wpp > 0.0)) {
        strict.passed = false;
        strict.witness = t;
        break;
      }
    }
    report.checks.push_back(strict);
  }
  return report;
}

}  // namespace glv
