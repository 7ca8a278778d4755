#include "pmddi/waveguide.hpp"

#include <cmath>
#include <stdexcept>

namespace pmddi {

double beta_factor(const ChiralSpec& spec) {
  const double total = spec.total_rate();
  if (total <= 0) throw std::invalid_argument("all emission rates are zero");
  return spec.gamma_1d / total;
}

PhaseDiagnostics chain_phase_diagnostics(const Eigen::VectorXcd& b) {
  PhaseDiagnostics d;
  const int n = static_cast<int>(b.size());
  if (n == 0) throw std::invalid_argument("empty amplitude vector");
  d.profile = b.cwiseAbs2();
  const double total = d.profile.sum();
  if (total <= 0) return d;  // nothing excited, diagnostics stay zero

  // Dominant nonzero spatial frequency of the population profile. For a
  // profile mean*(1 + C cos(2 pi f mu)) the contrast below recovers C.
  double best = 0.0;
  int best_m = 0;
  for (int m = 1; m <= n / 2; ++m) {
    Complex f = 0;
    for (int mu = 0; mu < n; ++mu)
      f += d.profile[mu] * std::exp(-kI * (kTwoPi * m * mu / n));
    if (std::abs(f) > best) {
      best = std::abs(f);
      best_m = m;
    }
  }
  d.fourier_peak = static_cast<double>(best_m) / n;
  d.fourier_contrast = 2.0 * best / total;

  const int ne = static_cast<int>(std::ceil(0.1 * n));
  double edge = 0;
  for (int mu = 0; mu < std::min(ne, n); ++mu) edge += d.profile[mu];
  for (int mu = std::max(n - ne, ne); mu < n; ++mu) edge += d.profile[mu];
  d.edge_fraction = edge / total;
  return d;
}

ChainSteadyState driven_chain_steady_state(const AtomEnsemble& chain,
                                           const ChiralSpec& spec,
                                           const DriveSpec& drive) {
  if (std::abs(drive.rabi) > 0.05 * spec.total_rate())
    throw std::invalid_argument(
        "drive too strong for the weak-excitation chain model (needs rabi <= "
        "0.05 * total rate)");
  ChainSteadyState out;
  out.chain = chain;
  const CouplingMatrix coupling = waveguide_coupling(chain, spec);
  try {
    out.b = steady_state(coupling, drive).b;
  } catch (const SingularSystemError&) {
    out.diagnostics.singular = true;  // critical point of the phase diagram
    return out;
  }
  out.diagnostics = chain_phase_diagnostics(out.b);
  return out;
}

ChainSteadyState driven_chain_steady_state(int n, double xi,
                                           const ChiralSpec& spec, double rabi,
                                           double detuning, GuidedInput input) {
  const AtomEnsemble chain = make_chain(n, xi);
  DriveSpec drive;
  switch (input) {
    case GuidedInput::left:
      drive = guided_drive(chain, rabi, detuning);
      break;
    case GuidedInput::right: {
      drive = guided_drive(chain, rabi, detuning);
      drive.phases = drive.phases.conjugate();
      break;
    }
    case GuidedInput::transverse:
      drive = DriveSpec{rabi, detuning, Eigen::VectorXcd::Ones(n)};
      break;
  }
  return driven_chain_steady_state(chain, spec, drive);
}

QuenchResult quench_zones(const std::vector<ZoneSpec>& zones, int initial_site,
                          const Eigen::VectorXd& times, const ChiralSpec& spec) {
  const AtomEnsemble chain = make_chain_zones(zones);
  const int n = chain.n();
  if (initial_site < 0 || initial_site >= n)
    throw std::invalid_argument("initial site outside the chain");
  if (times.size() < 1) throw std::invalid_argument("empty time grid");

  const CouplingMatrix coupling = waveguide_coupling(chain, spec);
  Eigen::VectorXcd b0 = Eigen::VectorXcd::Zero(n);
  b0[initial_site] = 1.0;

  QuenchResult out;
  out.trajectory = evolve(coupling, undriven(n), b0, times);
  out.times = times;
  out.middle_zone = static_cast<int>(zones.size() - 1) / 2;

  const int nt = static_cast<int>(times.size());
  const int nz = static_cast<int>(zones.size());
  out.zone_population.setZero(nt, nz);
  out.total.resize(nt);
  out.retention.resize(nt);
  const double p0 = b0.cwiseAbs2().sum();
  for (int t = 0; t < nt; ++t) {
    int mu = 0;
    for (int z = 0; z < nz; ++z)
      for (int j = 0; j < zones[z].n; ++j, ++mu)
        out.zone_population(t, z) += std::norm(out.trajectory.b(t, mu));
    out.total[t] = out.zone_population.row(t).sum();
    out.retention[t] = out.zone_population(t, out.middle_zone) / p0;
  }
  return out;
}

}  // namespace pmddi
