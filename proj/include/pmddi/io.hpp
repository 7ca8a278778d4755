#pragma once

// CSV/JSON emission for every workflow, plus the run manifest. All numbers
// are written with 17 significant digits so files round-trip to the exact
// double and can serve as regression fixtures.

#include <filesystem>
#include <string>
#include <vector>

#include "pmddi/bands.hpp"
#include "pmddi/dynamics.hpp"
#include "pmddi/geometry.hpp"
#include "pmddi/kernel.hpp"
#include "pmddi/transmission.hpp"
#include "pmddi/waveguide.hpp"

namespace pmddi {

std::string format_double(double v);  // %.17g

// Generic numeric CSV: one header line, then rows of doubles.
struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd rows;

  int column(const std::string& name) const;  // -1 when absent
};

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const Eigen::MatrixXd& rows);
CsvTable read_csv(const std::filesystem::path& path);

// idx,x,y,z with a .json sidecar carrying the label.
void write_ensemble_csv(const std::filesystem::path& path,
                        const AtomEnsemble& ensemble);
AtomEnsemble read_ensemble_csv(const std::filesystem::path& path);

// Row mu: re/im pairs of J(mu, nu) for each nu.
void write_coupling_csv(const std::filesystem::path& path,
                        const CouplingMatrix& coupling);

// mode,rate,shift
void write_eigenmodes_csv(const std::filesystem::path& path,
                          const EigenmodeSet& modes);

// time,re_0,im_0,...
void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& trajectory);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

// detuning,re_t,im_t,abs_t2,od (+ fit sidecar JSON)
void write_spectrum_csv(const std::filesystem::path& path,
                        const SpectrumScan& scan);
void write_lorentzian_fit_json(const std::filesystem::path& path,
                               const LorentzianFit& fit);

// spacing_over_lambda,abs_t2
void write_mirror_csv(const std::filesystem::path& path,
                      const MirrorScan& scan);

// One phase-map row per parameter point.
struct PhaseMapRow {
  double d_factor;
  double xi_over_pi;
  PhaseDiagnostics diagnostics;
};
// d,xi_over_pi,fourier_peak,contrast,edge_fraction,singular_flag
void write_phase_map_csv(const std::filesystem::path& path,
                         const std::vector<PhaseMapRow>& rows);

// time,zone1,...,zoneK,total,retention
void write_quench_csv(const std::filesystem::path& path,
                      const QuenchResult& quench);

// kx,ky,band,shift,decay,in_light_cone (long format)
void write_bands_csv(const std::filesystem::path& path, const BandSet& bands);

// k_par,mode,re,im,com,ipr
void write_ribbon_csv(const std::filesystem::path& path,
                      const RibbonSpectrum& ribbon);

void write_chern_json(const std::filesystem::path& path,
                      const ChernSpectrum& chern);

// manifest.json: resolved config echo, tool version, wall time, warnings,
// list of produced files.
void write_manifest(const std::filesystem::path& dir,
                    const std::string& resolved_config_json,
                    const std::string& version, double wall_seconds,
                    const std::vector<std::string>& warnings,
                    const std::vector<std::string>& outputs);

}  // namespace pmddi
