#pragma once

// Emitter geometries. All generators are deterministic: the same (inputs,
// seed) reproduce the same ensemble bit for bit within a build.

#include <cstdint>
#include <string>
#include <vector>

#include "pmddi/types.hpp"

namespace pmddi {

struct AtomEnsemble {
  Eigen::Matrix3Xd positions;  // one column per atom, 1/k_L units
  std::string label;

  int n() const { return static_cast<int>(positions.cols()); }
};

// Wraps raw positions in an ensemble, rejecting coincident atoms
// (pair distance < 1e-12).
AtomEnsemble make_ensemble(const Eigen::Matrix3Xd& positions,
                           const std::string& label = "custom");

// Gaussian cloud centered at the origin with per-axis standard deviations.
AtomEnsemble make_gaussian_cloud(int n, const Vec3& sigma, std::uint64_t seed);

// Uniformly filled cylinder with axis along z, centered at the origin.
// length == 0 degenerates to a uniform disk in the z = 0 plane.
AtomEnsemble make_uniform_cylinder(int n, double radius, double length,
                                   std::uint64_t seed);

// Planar lattices in the z = 0 plane, centered on their centroid.
AtomEnsemble make_square_lattice(int m1, int m2, double a);
AtomEnsemble make_rectangular_lattice(int m1, int m2, double a, double eta);
// Honeycomb patch of m1 x m2 primitive cells, two atoms per cell with
// nearest-neighbor distance a.
AtomEnsemble make_honeycomb_lattice(int m1, int m2, double a);
AtomEnsemble make_ring(int n, double radius);

// Collinear chain along +x starting at the origin with spacing xi.
AtomEnsemble make_chain(int n, double xi);

struct ZoneSpec {
  int n;      // atoms in this zone
  double xi;  // intra-zone spacing
};

// Concatenated chain zones along +x. The gap between two zones equals the
// spacing of the *later* zone, so [(2, a), (2, b)] sits at 0, a, a+b, a+2b.
AtomEnsemble make_chain_zones(const std::vector<ZoneSpec>& zones);

// Smallest pairwise distance; requires n >= 2.
double min_pair_distance(const AtomEnsemble& ensemble);

// Transition polarization. linear carries a unit axis; the circular modes
// refer to e_pm = -/+ (x_hat +/- i y_hat)/sqrt(2); v_type means both circular
// transitions are present (used by the lattice band module).
struct PolarizationSpec {
  enum class Mode { linear, sigma_plus, sigma_minus, v_type };

  Mode mode = Mode::linear;
  Vec3 axis = Vec3::UnitZ();  // meaningful for linear only

  static PolarizationSpec linear(const Vec3& direction);
  static PolarizationSpec sigma_plus() { return {Mode::sigma_plus, Vec3::UnitZ()}; }
  static PolarizationSpec sigma_minus() { return {Mode::sigma_minus, Vec3::UnitZ()}; }
  static PolarizationSpec v_type() { return {Mode::v_type, Vec3::UnitZ()}; }
};

}  // namespace pmddi
