#pragma once

// Common aliases and error types for the collective-emission toolkit.
//
// Unit conventions used throughout:
//   - lengths are dimensionless, measured in 1/k_L (so lambda = 2*pi)
//   - rates are measured in the single-emitter decay rate passed to the
//     kernel builders (Gamma for free space, Gamma_1D for the waveguide)
//   - the pairwise coupling matrix is J = gamma/2 + i*Omega, with
//     gamma = 2*Re(J) the dissipative part and Omega = Im(J) off-diagonal
//     the coherent part

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace pmddi {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr Complex kI{0.0, 1.0};

// Numerical failures (as opposed to bad arguments, which throw
// std::invalid_argument). The CLI maps invalid_argument to exit code 1 and
// NumericalError to exit code 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Linear system (J - i*Delta) b = d is singular: a dark mode sits exactly at
// the drive frequency. Carries the offending eigenvalue of J.
struct SingularSystemError : NumericalError {
  Complex eigenvalue;
  explicit SingularSystemError(const std::string& msg, Complex lambda)
      : NumericalError(msg), eigenvalue(lambda) {}
};

// Kernel evaluated at (numerically) zero separation.
struct DivergenceError : NumericalError {
  using NumericalError::NumericalError;
};

// Iterative procedure (fit, integrator) failed to converge.
struct ConvergenceError : NumericalError {
  using NumericalError::NumericalError;
};

// Requested bands are not separated by a spectral gap; a topological index
// cannot be assigned.
struct GaplessBandError : NumericalError {
  Vec2 k_touch;
  double gap;
  GaplessBandError(const std::string& msg, const Vec2& k, double g)
      : NumericalError(msg), k_touch(k), gap(g) {}
};

// Problem size exceeds what the exact solver can represent.
struct CapacityError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Operation not defined for the given coupling (e.g. emitted power for a
// non-reciprocal waveguide).
struct UnsupportedConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace pmddi
