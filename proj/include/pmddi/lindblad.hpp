#pragma once

// Exact open-system reference solver on the full 2^N product space.
//
// The master equation integrated here is
//   drho/dt = -i[H, rho]
//             + sum_{mu,nu} gamma(mu,nu) (sigma_nu rho sigma_mu^dag
//                                         - 1/2 {sigma_mu^dag sigma_nu, rho})
// with gamma = J + J^dag,
//   H = -Delta sum_mu n_mu + sum_{mu != nu} Omega(mu,nu) sigma_mu^dag sigma_nu
//       - 1/2 sum_mu (Omega_0 phase_mu sigma_mu^dag + h.c.),
// Omega = (J - J^dag)/(2i). The drive sign is fixed by requiring that the
// weak-field limit reproduce db/dt = ... + (i*Omega_0/2) phase of the
// coupled-dipole model. Splitting J into its Hermitian/anti-Hermitian parts
// covers reciprocal and chiral couplings alike.
//
// Intended as a verification oracle: capacity is capped at 10 atoms.

#include "pmddi/dynamics.hpp"
#include "pmddi/kernel.hpp"
#include "pmddi/types.hpp"

namespace pmddi {

inline constexpr int kMaxExactAtoms = 10;

// |g...g><g...g| on the 2^n space.
Eigen::MatrixXcd ground_density(int n_atoms);
// Pure state with exactly atom `site` excited.
Eigen::MatrixXcd single_excitation_density(int n_atoms, int site);

struct LindbladResult {
  Eigen::VectorXd times;
  Eigen::MatrixXcd sigma;       // row t, col mu: <sigma_mu>
  Eigen::MatrixXd populations;  // row t, col mu: <sigma_mu^dag sigma_mu>
  Eigen::VectorXd trace;        // tr(rho) per time point (conservation check)
  Eigen::MatrixXcd rho_final;
};

struct LindbladOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double steady_tolerance = 1e-11;  // max |drho/dt| entry for steady detection
  double steady_horizon = 1e4;      // give up integrating to steady after this
};

// Integrates from rho0 (default: ground state) taken at times[0] and samples
// the observables on the given monotone grid.
LindbladResult exact_lindblad(const CouplingMatrix& coupling,
                              const DriveSpec& drive,
                              const Eigen::VectorXd& times,
                              const Eigen::MatrixXcd* rho0 = nullptr,
                              const LindbladOptions& options = {});

// Steady density matrix: direct null-space solve of the Liouvillian for
// n <= 5, time integration to stationarity above that.
Eigen::MatrixXcd exact_steady_state(const CouplingMatrix& coupling,
                                    const DriveSpec& drive,
                                    const LindbladOptions& options = {});

Eigen::VectorXcd sigma_expectations(const Eigen::MatrixXcd& rho, int n_atoms);
Eigen::VectorXd excited_populations(const Eigen::MatrixXcd& rho, int n_atoms);

// Equal-time second-order coherence of the collective mode
// d = sum_mu weights_mu sigma_mu:
//   g2(0) = <d^dag d^dag d d> / <d^dag d>^2.
// Returns +infinity when the denominator falls below 1e-14 (no steady
// excitation in the detection mode).
double g2_zero(const Eigen::MatrixXcd& rho, const Eigen::VectorXcd& weights);

}  // namespace pmddi
