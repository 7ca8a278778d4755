#pragma once

// Bloch analysis of infinite 2D emitter lattices with the free-space tensor
// kernel: complex band structures, Zeeman gap opening, Chern numbers and
// finite-width ribbon spectra.
//
// Conventions. The Bloch matrix returned by bloch_hamiltonian has
// eigenvalues E = shift - i*decay/2: Re E is the collective frequency shift
// (same sign as the finite-system shift delta = -Im lambda of the coupling
// matrix) and decay = -2 Im E matches Gamma_n = 2 Re lambda. V-type levels
// use the circular basis (sigma+, sigma-); the Zeeman field moves them by
// +/- zeeman. Exact periodicity H(k + G) = H(k) is enforced by putting the
// Bloch phase on lattice vectors only and wrapping k to reduced coordinates.

#include <array>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "pmddi/types.hpp"

namespace pmddi {

enum class LatticeKind { square, rectangular, honeycomb };
enum class LevelScheme { sigma_plus, sigma_minus, v_type };

struct LatticeSpec2D {
  LatticeKind kind = LatticeKind::honeycomb;
  double a = 0.05 * kTwoPi;  // nearest-neighbor spacing, k_L = 1 units
  double eta = 1.0;          // rectangular only: second axis is eta * a
  double zeeman = 0.0;       // sigma+/- transitions shifted by +/- zeeman
  double gamma_total = 1.0;
  LevelScheme levels = LevelScheme::v_type;

  std::array<Vec2, 2> bravais() const;
  std::array<Vec2, 2> reciprocal() const;
  std::vector<Vec2> basis() const;  // sublattice offsets
  int internal_levels() const { return levels == LevelScheme::v_type ? 2 : 1; }
  int bands() const {
    return static_cast<int>(basis().size()) * internal_levels();
  }
  void validate(double r_cut) const;
};

// k in reduced coordinates (k = f1 b1 + f2 b2), wrapped to [0,1)^2.
Vec2 reduced_k(const LatticeSpec2D& spec, const Vec2& k);

Eigen::MatrixXcd bloch_hamiltonian(const LatticeSpec2D& spec, const Vec2& k,
                                   double r_cut);

// Upper envelope for the truncation remainder of the lattice sum, measured
// from the oscillation of partial sums over the trailing wavelength.
double bloch_tail_estimate(const LatticeSpec2D& spec, const Vec2& k,
                           double r_cut);

struct HighSymmetryPoints {
  Vec2 gamma, k, k_prime, m;
};

HighSymmetryPoints high_symmetry_points(const LatticeSpec2D& spec);

// Gamma -> K -> M -> Gamma with `per_segment` steps per leg (closing point
// included once at the start).
std::vector<Vec2> high_symmetry_path(const LatticeSpec2D& spec,
                                     int per_segment);

struct BandSet {
  std::vector<Vec2> k_path;
  Eigen::MatrixXcd eigenvalues;  // row per k, sorted by Re ascending
  Eigen::MatrixXd shifts;        // Re E
  Eigen::MatrixXd decays;        // -2 Im E
  std::vector<Eigen::MatrixXcd> modes;  // right eigenvectors per k
  std::vector<bool> in_light_cone;      // |k| < k_L
  double tail_bound = 0.0;
  bool tail_warning = false;
};

BandSet band_structure(const LatticeSpec2D& spec,
                       const std::vector<Vec2>& k_path, double r_cut);

struct ChernSpectrum {
  std::vector<std::pair<int, int>> groups;  // inclusive band-index ranges
  std::vector<int> chern;                   // per group
  std::vector<double> residuals;            // |plaquette sum/2pi - integer|
  double min_intergroup_gap = 0.0;
  int grid = 0;
};

// Plaquette (link-variable) Chern numbers of the Hermitian part of H(k) on
// an m x m reduced-coordinate grid. Bands that never separate by more than
// gap_threshold are treated as one composite band. Throws GaplessBandError
// when no gap divides the spectrum anywhere (e.g. zeeman = 0 honeycomb).
ChernSpectrum chern_numbers(const LatticeSpec2D& spec, int grid, double r_cut,
                            double gap_threshold = 1e-6);

// Chern number of the composite band containing band_index.
int chern_number(const LatticeSpec2D& spec, int band_index, int grid,
                 double r_cut, double gap_threshold = 1e-6);

struct RibbonSpectrum {
  double k_par = 0.0;
  int width = 0;
  Eigen::VectorXcd eigenvalues;  // 2*width, sorted by Re ascending
  Eigen::MatrixXcd modes;        // right eigenvectors as columns
  Eigen::VectorXd com;           // transverse center of mass in [0,1]
  Eigen::VectorXd ipr;           // inverse participation ratio of |psi|^2
};

// Open-boundary strip of `width` cells cut along the [11] direction of a
// square/rectangular lattice (2 sites per periodic cell), Bloch phase k_par
// along the strip. Single-level schemes only.
RibbonSpectrum ribbon_spectrum(const LatticeSpec2D& spec, int width,
                               double k_par, double r_cut);

inline bool in_light_cone(const Vec2& k) { return k.norm() < 1.0; }

}  // namespace pmddi
