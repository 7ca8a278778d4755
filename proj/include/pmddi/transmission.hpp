#pragma once

// Coherent forward transmission of a weak probe through an ensemble.
//
// Plane-wave normalization over a disk of radius R (probe along +z):
//   T = 1 + i (3 Gamma / (Omega_0 R^2)) sum_mu b_mu exp(-i z_mu)
// Gaussian-mode overlap for waist w0 (effective area pi w0^2 / 2):
//   T = 1 + i (6 Gamma / (Omega_0 w0^2)) sum_mu u*(r_mu) b_mu exp(-i z_mu)
// Optical depth is -ln|T|^2.

#include <optional>
#include <vector>

#include "pmddi/dynamics.hpp"
#include "pmddi/kernel.hpp"

namespace pmddi {

Complex transmission_plane_wave(const AtomEnsemble& ensemble,
                                const Eigen::VectorXcd& b, double rabi,
                                double disk_radius, double gamma_total = 1.0);

Complex gaussian_mode_transmission(const AtomEnsemble& ensemble,
                                   const Eigen::VectorXcd& b, double rabi,
                                   double waist, double gamma_total = 1.0);

double optical_depth(Complex t);

struct ProbeGeometry {
  enum class Kind { plane, gaussian };
  Kind kind = Kind::plane;
  double size = 1.0;  // disk radius R (plane) or waist w0 (gaussian)
};

struct LorentzianFit {
  double center = 0.0;
  double fwhm = 0.0;
  double depth = 0.0;   // dip amplitude
  double offset = 0.0;  // baseline
  bool converged = false;
  int iterations = 0;
  double rss = 0.0;  // residual sum of squares
};

// Unweighted least squares of |T|^2(Delta) against
//   offset - depth / (1 + 4 (Delta - center)^2 / fwhm^2).
LorentzianFit fit_lorentzian_dip(const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y);

struct SpectrumScan {
  Eigen::VectorXd detunings;
  Eigen::VectorXcd t;  // complex transmission per detuning
  LorentzianFit fit;
};

// Steady-state transmission spectrum over a detuning grid (>= 5 points).
// The probe both drives the atoms and defines the collection mode.
SpectrumScan spectrum_scan(const CouplingMatrix& coupling,
                           const AtomEnsemble& ensemble, double rabi,
                           const Eigen::VectorXd& detunings,
                           const ProbeGeometry& probe);

struct MirrorScan {
  Eigen::VectorXd spacings_over_lambda;
  Eigen::VectorXd abs_t2;            // |T|^2 at resonance per spacing
  std::vector<double> minima;        // locations of interior local minima
};

// Resonant |T|^2 of an m x m square array versus lattice spacing, probed by
// a normally incident Gaussian beam (waist in lambda units), linear in-plane
// polarization.
MirrorScan mirror_scan(int m, const Eigen::VectorXd& spacings_over_lambda,
                       double waist_over_lambda, double gamma_total = 1.0);

}  // namespace pmddi
