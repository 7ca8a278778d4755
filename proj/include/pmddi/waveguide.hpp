#pragma once

// Chiral-chain steady-state phase diagnostics and zoned-chain quenches.
//
// Chains sit on the x axis with guided phases x_mu = k_wg x_mu (k_wg = 1).
// The default drive enters the guided mode from the left, phase e^{i x_mu}.

#include <vector>

#include "pmddi/dynamics.hpp"
#include "pmddi/geometry.hpp"
#include "pmddi/kernel.hpp"

namespace pmddi {

// Fraction of the emission entering the guided mode.
double beta_factor(const ChiralSpec& spec);

struct PhaseDiagnostics {
  Eigen::VectorXd profile;      // |b_mu|^2 per site
  double fourier_peak = 0.0;    // dominant nonzero spatial frequency, cycles/site
  double fourier_contrast = 0.0;  // 2 |F_peak| / sum(profile)
  double edge_fraction = 0.0;   // population share of outer 10% sites each side
  bool singular = false;        // steady solve hit a near-dark mode
};

PhaseDiagnostics chain_phase_diagnostics(const Eigen::VectorXcd& b);

enum class GuidedInput { left, right, transverse };

struct ChainSteadyState {
  AtomEnsemble chain;
  Eigen::VectorXcd b;  // empty when diagnostics.singular
  PhaseDiagnostics diagnostics;
};

// Weakly driven uniform chain of n sites at spacing xi. A singular steady
// system is reported through diagnostics.singular, not thrown: those are the
// critical points of the phase diagram.
ChainSteadyState driven_chain_steady_state(int n, double xi,
                                           const ChiralSpec& spec, double rabi,
                                           double detuning = 0.0,
                                           GuidedInput input = GuidedInput::left);

// Same solve for a caller-supplied chain and drive profile.
ChainSteadyState driven_chain_steady_state(const AtomEnsemble& chain,
                                           const ChiralSpec& spec,
                                           const DriveSpec& drive);

struct QuenchResult {
  Eigen::VectorXd times;
  Eigen::MatrixXd zone_population;  // row t -> population per zone
  Eigen::VectorXd total;            // sum over zones
  Eigen::VectorXd retention;        // middle-zone population / initial total
  int middle_zone = 0;
  Trajectory trajectory;
};

// Undriven decay of a single-site excitation on a zoned chain.
QuenchResult quench_zones(const std::vector<ZoneSpec>& zones, int initial_site,
                          const Eigen::VectorXd& times, const ChiralSpec& spec);

}  // namespace pmddi
