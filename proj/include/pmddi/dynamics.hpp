#pragma once

// Weak-drive coupled-dipole dynamics. The equation of motion is
//   db_mu/dt = i*Delta b_mu - sum_nu J(mu,nu) b_nu + (i*Omega_0/2) phase_mu,
// so the evolution matrix is M = i*Delta*I - J and the steady state solves
// (J - i*Delta) b = d with d = (i*Omega_0/2) * phases.

#include "pmddi/geometry.hpp"
#include "pmddi/kernel.hpp"
#include "pmddi/types.hpp"

namespace pmddi {

struct DriveSpec {
  double rabi = 0.0;      // Omega_0
  double detuning = 0.0;  // Delta = omega_L - omega_0
  Eigen::VectorXcd phases;  // per-atom profile, |phase| <= 1
};

// Validates |phase_mu| <= 1 (+1e-12); throws std::invalid_argument.
void validate_drive(const DriveSpec& drive, int n_atoms);

DriveSpec undriven(int n_atoms, double detuning = 0.0);
// Plane wave exp(i k_hat . r) with |k| = k_L = 1; default propagation +z.
DriveSpec plane_wave_drive(const AtomEnsemble& ensemble, double rabi,
                           double detuning, const Vec3& k_hat = Vec3::UnitZ());
// Focused Gaussian beam u(r) exp(i z) with waist w0 at the z = 0 plane.
DriveSpec gaussian_beam_drive(const AtomEnsemble& ensemble, double rabi,
                              double detuning, double waist);
// Guided mode exp(i x_mu) along the waveguide axis (left input port).
DriveSpec guided_drive(const AtomEnsemble& ensemble, double rabi,
                       double detuning);

// Unit-peak paraxial Gaussian envelope (curvature and Gouy phase included,
// plane-wave factor exp(i z) excluded) for waist w0 at z = 0, k_L = 1.
Complex paraxial_mode(const Vec3& r, double waist);

Eigen::MatrixXcd build_evolution_matrix(const CouplingMatrix& coupling,
                                        double detuning);
Eigen::VectorXcd drive_vector(const DriveSpec& drive);

struct EigenmodeSet {
  Eigen::VectorXcd eigenvalues;  // lambda_n of J, sorted by rate ascending
  Eigen::VectorXd rates;         // Gamma_n = 2 Re lambda_n
  Eigen::VectorXd shifts;        // delta_n = -Im lambda_n
  Eigen::MatrixXcd modes;        // right eigenvectors as columns (may be empty)
};

EigenmodeSet eigenmodes(const CouplingMatrix& coupling, bool with_modes = true);

struct DipoleState {
  Eigen::VectorXcd b;
  double time = 0.0;
};

struct Trajectory {
  Eigen::VectorXd times;
  Eigen::MatrixXcd b;  // row t -> amplitudes at times[t]

  DipoleState at(int t) const { return {b.row(t).transpose(), times[t]}; }
};

// Steady amplitudes; residual is guaranteed below 1e-10 * |d| or a
// SingularSystemError names the eigenvalue closest to i*Delta.
DipoleState steady_state(const CouplingMatrix& coupling, const DriveSpec& drive);

// Propagates b0 (taken at times[0]) through the monotone grid `times` with
// the exact exponential of the constant-coefficient system, so the only
// error is floating-point roundoff.
Trajectory evolve(const CouplingMatrix& coupling, const DriveSpec& drive,
                  const Eigen::VectorXcd& b0, const Eigen::VectorXd& times);

// Total emitted power P = sum_{mu,nu} gamma(mu,nu) b_mu^* b_nu. Defined for
// reciprocal couplings only; equals -d/dt sum |b|^2 for undriven evolution.
double emitted_power(const CouplingMatrix& coupling, const Eigen::VectorXcd& b);

}  // namespace pmddi
