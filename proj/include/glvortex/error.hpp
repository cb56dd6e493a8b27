#pragma once

#include <stdexcept>
#include <string>

namespace glv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Grid or array sizes outside the supported range.
class SizingError : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  LengthMismatch(std::size_t expected, std::size_t got)
      : Error("length mismatch: expected " + std::to_string(expected) + " samples, got " +
              std::to_string(got)),
        expected(expected),
        got(got) {}
  std::size_t expected;
  std::size_t got;
};

/// Argument outside the domain of a function (e.g. W evaluated at t > 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Profile violates the boundary data f(1) = 1, g(1) = 0.
class BoundaryViolation : public Error {
 public:
  using Error::Error;
};

class EpsilonMismatch : public Error {
 public:
  EpsilonMismatch(double expected, double got)
      : Error("epsilon mismatch: profile solved at " + std::to_string(got) + ", requested " +
              std::to_string(expected)) {}
};

/// Iterative solver exhausted its budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& solver, int iterations, double residual)
      : Error(solver + " did not converge after " + std::to_string(iterations) +
              " iterations (residual " + std::to_string(residual) + ")"),
        iterations(iterations),
        residual(residual) {}
  int iterations;
  double residual;
};

/// NaN or infinity appeared in an iterate.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Energy integral diverges for the given profile.
class DivergentEnergy : public Error {
 public:
  using Error::Error;
};

/// No critical epsilon exists (dimension N >= 7).
class NoThresholdError : public Error {
 public:
  explicit NoThresholdError(int N)
      : Error("no threshold epsilon_N for N = " + std::to_string(N) +
              ": the principal eigenvalue stays positive (Hardy constant " +
              std::to_string((N - 2.0) * (N - 2.0) / 4.0 - (N - 1.0)) + " >= 0)"),
        dimension(N) {}
  int dimension;
};

class BracketError : public Error {
 public:
  BracketError(double lo, double ell_lo, double hi, double ell_hi)
      : Error("bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
              "] fails sign conditions: ell(lo) = " + std::to_string(ell_lo) +
              ", ell(hi) = " + std::to_string(ell_hi)),
        lo(lo),
        hi(hi),
        ell_lo(ell_lo),
        ell_hi(ell_hi) {}
  double lo, hi, ell_lo, ell_hi;
};

/// Full-field descent kept increasing the energy.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace glv
