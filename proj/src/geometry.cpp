#include "pmddi/geometry.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace pmddi {

namespace {

// Construction-time sanity: no two atoms may coincide, otherwise the pair
// kernel diverges later in a much less debuggable place.
void check_distinct(const Eigen::Matrix3Xd& pos) {
  const int n = static_cast<int>(pos.cols());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if ((pos.col(i) - pos.col(j)).norm() < 1e-12) {
        std::ostringstream msg;
        msg << "coincident atoms " << i << " and " << j;
        throw std::invalid_argument(msg.str());
      }
    }
  }
}

void check_count(int n) {
  if (n < 1) throw std::invalid_argument("atom count must be >= 1");
}

}  // namespace

AtomEnsemble make_ensemble(const Eigen::Matrix3Xd& positions,
                           const std::string& label) {
  check_distinct(positions);
  return {positions, label};
}

AtomEnsemble make_gaussian_cloud(int n, const Vec3& sigma, std::uint64_t seed) {
  check_count(n);
  if ((sigma.array() < 0).any() || sigma.maxCoeff() <= 0)
    throw std::invalid_argument("gaussian cloud needs sigma >= 0 with at least one axis > 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Matrix3Xd pos(3, n);
  for (int i = 0; i < n; ++i)
    for (int ax = 0; ax < 3; ++ax) pos(ax, i) = sigma[ax] * gauss(rng);
  check_distinct(pos);
  return {pos, "gaussian_cloud"};
}

AtomEnsemble make_uniform_cylinder(int n, double radius, double length,
                                   std::uint64_t seed) {
  check_count(n);
  if (radius <= 0) throw std::invalid_argument("cylinder radius must be > 0");
  if (length < 0) throw std::invalid_argument("cylinder length must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Eigen::Matrix3Xd pos(3, n);
  for (int i = 0; i < n; ++i) {
    // Uniform over the disk: radial CDF r^2/R^2, hence r = R*sqrt(u).
    const double r = radius * std::sqrt(uni(rng));
    const double phi = kTwoPi * uni(rng);
    pos(0, i) = r * std::cos(phi);
    pos(1, i) = r * std::sin(phi);
    pos(2, i) = length > 0 ? length * (uni(rng) - 0.5) : 0.0;
  }
  check_distinct(pos);
  return {pos, length > 0 ? "uniform_cylinder" : "uniform_disk"};
}

namespace {

AtomEnsemble centered_plane_lattice(int m1, int m2, double a1x, double a2y,
                                    const std::string& label) {
  if (m1 < 1 || m2 < 1) throw std::invalid_argument("lattice extents must be >= 1");
  Eigen::Matrix3Xd pos(3, m1 * m2);
  int idx = 0;
  for (int j = 0; j < m2; ++j)
    for (int i = 0; i < m1; ++i) pos.col(idx++) = Vec3(i * a1x, j * a2y, 0.0);
  pos.colwise() -= pos.rowwise().mean();
  check_distinct(pos);
  return {pos, label};
}

}  // namespace

AtomEnsemble make_square_lattice(int m1, int m2, double a) {
  if (a <= 0) throw std::invalid_argument("lattice spacing must be > 0");
  return centered_plane_lattice(m1, m2, a, a, "square_lattice");
}

AtomEnsemble make_rectangular_lattice(int m1, int m2, double a, double eta) {
  if (a <= 0 || eta <= 0)
    throw std::invalid_argument("lattice spacing and aspect ratio must be > 0");
  return centered_plane_lattice(m1, m2, a, eta * a, "rectangular_lattice");
}

AtomEnsemble make_honeycomb_lattice(int m1, int m2, double a) {
  if (m1 < 1 || m2 < 1) throw std::invalid_argument("lattice extents must be >= 1");
  if (a <= 0) throw std::invalid_argument("lattice spacing must be > 0");
  const double a0 = std::sqrt(3.0) * a;  // Bravais constant for nn distance a
  const Vec3 v1(a0, 0.0, 0.0);
  const Vec3 v2(0.5 * a0, 0.5 * std::sqrt(3.0) * a0, 0.0);
  const Vec3 db(0.5 * a0, 0.5 * a0 / std::sqrt(3.0), 0.0);
  Eigen::Matrix3Xd pos(3, 2 * m1 * m2);
  int idx = 0;
  for (int j = 0; j < m2; ++j)
    for (int i = 0; i < m1; ++i) {
      const Vec3 cell = i * v1 + j * v2;
      pos.col(idx++) = cell;
      pos.col(idx++) = cell + db;
    }
  pos.colwise() -= pos.rowwise().mean();
  check_distinct(pos);
  return {pos, "honeycomb_lattice"};
}

AtomEnsemble make_ring(int n, double radius) {
  check_count(n);
  if (radius <= 0) throw std::invalid_argument("ring radius must be > 0");
  Eigen::Matrix3Xd pos(3, n);
  for (int i = 0; i < n; ++i) {
    const double phi = kTwoPi * i / n;
    pos.col(i) = Vec3(radius * std::cos(phi), radius * std::sin(phi), 0.0);
  }
  check_distinct(pos);
  return {pos, "ring"};
}

AtomEnsemble make_chain(int n, double xi) {
  check_count(n);
  if (xi <= 0) throw std::invalid_argument("chain spacing must be > 0");
  Eigen::Matrix3Xd pos = Eigen::Matrix3Xd::Zero(3, n);
  for (int i = 0; i < n; ++i) pos(0, i) = i * xi;
  return {pos, "chain"};
}

AtomEnsemble make_chain_zones(const std::vector<ZoneSpec>& zones) {
  if (zones.empty()) throw std::invalid_argument("zone list must not be empty");
  int total = 0;
  for (const auto& z : zones) {
    if (z.n < 1) throw std::invalid_argument("each zone needs n >= 1");
    if (z.xi <= 0) throw std::invalid_argument("zone spacing must be > 0");
    total += z.n;
  }
  Eigen::Matrix3Xd pos = Eigen::Matrix3Xd::Zero(3, total);
  double x = 0.0;
  int idx = 0;
  for (std::size_t zi = 0; zi < zones.size(); ++zi) {
    // The boundary gap between zone zi-1 and zone zi uses zone zi's spacing.
    for (int i = 0; i < zones[zi].n; ++i) {
      if (idx > 0) x += zones[zi].xi;
      pos(0, idx++) = x;
    }
  }
  return {pos, "chain_zones"};
}

double min_pair_distance(const AtomEnsemble& ensemble) {
  const int n = ensemble.n();
  if (n < 2) throw std::invalid_argument("min_pair_distance needs n >= 2");
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      best = std::min(best,
                      (ensemble.positions.col(i) - ensemble.positions.col(j)).norm());
  return best;
}

PolarizationSpec PolarizationSpec::linear(const Vec3& direction) {
  const double norm = direction.norm();
  if (norm < 1e-12) throw std::invalid_argument("polarization axis must be nonzero");
  return {Mode::linear, direction / norm};
}

}  // namespace pmddi
