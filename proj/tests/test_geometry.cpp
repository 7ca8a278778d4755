#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "pmddi/geometry.hpp"

using namespace pmddi;

namespace {

// O(n^2) reference, kept deliberately separate from the library routine.
double brute_min_distance(const AtomEnsemble& e) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < e.n(); ++i)
    for (int j = i + 1; j < e.n(); ++j)
      best = std::min(best, (e.positions.col(i) - e.positions.col(j)).norm());
  return best;
}

// Kolmogorov-Smirnov distance of `samples` against the uniform CDF on [0,1].
double ks_uniform(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(std::abs(samples[i] - lo), std::abs(samples[i] - hi)));
  }
  return d;
}

}  // namespace

TEST_CASE("chain spacing and orientation") {
  const auto chain = make_chain(5, 0.7);
  CHECK(chain.n() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(chain.positions(0, i) == doctest::Approx(0.7 * i).epsilon(1e-15));
    CHECK(chain.positions(1, i) == 0.0);
    CHECK(chain.positions(2, i) == 0.0);
  }
  CHECK(min_pair_distance(chain) == doctest::Approx(0.7));
  CHECK(make_chain(1, 0.3).n() == 1);
  CHECK_THROWS_AS(make_chain(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(make_chain(3, -1.0), std::invalid_argument);
}

TEST_CASE("zone concatenation uses the later zone's spacing at the seam") {
  const double a = 1.5, b = 2.25;
  const auto zones = make_chain_zones({{2, a}, {2, b}});
  REQUIRE(zones.n() == 4);
  CHECK(zones.positions(0, 0) == doctest::Approx(0.0));
  CHECK(zones.positions(0, 1) == doctest::Approx(a));
  CHECK(zones.positions(0, 2) == doctest::Approx(a + b));
  CHECK(zones.positions(0, 3) == doctest::Approx(a + 2 * b));

  const auto three = make_chain_zones({{3, 0.5}, {4, 1.0}, {3, 0.5}});
  CHECK(three.n() == 10);
  // Zone boundaries: last of zone 1 at 1.0, first of zone 2 at 2.0 (gap 1.0),
  // last of zone 2 at 5.0, first of zone 3 at 5.5 (gap 0.5).
  CHECK(three.positions(0, 2) == doctest::Approx(1.0));
  CHECK(three.positions(0, 3) == doctest::Approx(2.0));
  CHECK(three.positions(0, 6) == doctest::Approx(5.0));
  CHECK(three.positions(0, 7) == doctest::Approx(5.5));

  CHECK_THROWS_AS(make_chain_zones({}), std::invalid_argument);
  CHECK_THROWS_AS(make_chain_zones({{0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_chain_zones({{2, 0.0}}), std::invalid_argument);
}

TEST_CASE("coincident atoms are rejected") {
  Eigen::Matrix3Xd pos(3, 2);
  pos.col(0) = Vec3(0.1, 0.2, 0.3);
  pos.col(1) = Vec3(0.1, 0.2, 0.3);
  CHECK_THROWS_AS(make_ensemble(pos), std::invalid_argument);
  pos.col(1) = Vec3(0.1, 0.2, 0.4);
  CHECK(make_ensemble(pos, "pair").label == "pair");
}

TEST_CASE("gaussian cloud statistics and determinism") {
  const int n = 4000;
  const Vec3 sigma(2.0, 3.0, 0.5);
  const auto a = make_gaussian_cloud(n, sigma, 42);
  const auto b = make_gaussian_cloud(n, sigma, 42);
  const auto c = make_gaussian_cloud(n, sigma, 43);
  CHECK((a.positions - b.positions).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.positions - c.positions).cwiseAbs().maxCoeff() > 0.0);
  for (int axis = 0; axis < 3; ++axis) {
    const double mean = a.positions.row(axis).mean();
    const double var =
        (a.positions.row(axis).array() - mean).square().sum() / (n - 1);
    // 5-sigma statistical bounds.
    CHECK(std::abs(mean) < 5.0 * sigma[axis] / std::sqrt(double(n)));
    CHECK(std::abs(var / (sigma[axis] * sigma[axis]) - 1.0) <
          5.0 * std::sqrt(2.0 / (n - 1)));
  }
}

TEST_CASE("uniform cylinder fills its volume uniformly") {
  const int n = 4000;
  const double radius = 3.0, length = 8.0;
  const auto cyl = make_uniform_cylinder(n, radius, length, 7);
  std::vector<double> u_r, u_z;
  for (int i = 0; i < n; ++i) {
    const double r2 = cyl.positions.col(i).head<2>().squaredNorm();
    REQUIRE(r2 <= radius * radius * (1 + 1e-12));
    REQUIRE(std::abs(cyl.positions(2, i)) <= 0.5 * length * (1 + 1e-12));
    // For a uniform disk, (r/R)^2 is uniform on [0,1]; z is uniform.
    u_r.push_back(r2 / (radius * radius));
    u_z.push_back(cyl.positions(2, i) / length + 0.5);
  }
  // 1.63/sqrt(n) is the asymptotic 1% KS critical value.
  CHECK(ks_uniform(u_r) < 1.63 / std::sqrt(double(n)));
  CHECK(ks_uniform(u_z) < 1.63 / std::sqrt(double(n)));
}

TEST_CASE("zero-length cylinder degenerates to a disk") {
  const auto disk = make_uniform_cylinder(200, 2.0, 0.0, 3);
  CHECK(disk.positions.row(2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lattices") {
  const double a = 0.8;
  const auto sq = make_square_lattice(4, 5, a);
  CHECK(sq.n() == 20);
  CHECK(min_pair_distance(sq) == doctest::Approx(a).epsilon(1e-12));
  CHECK(sq.positions.rowwise().mean().norm() < 1e-12);
  CHECK(sq.positions.row(2).cwiseAbs().maxCoeff() == 0.0);

  const double eta = 1.3;
  const auto rect = make_rectangular_lattice(4, 4, a, eta);
  CHECK(rect.n() == 16);
  CHECK(min_pair_distance(rect) == doctest::Approx(a).epsilon(1e-12));
  // Column spacing a, row spacing eta*a.
  const Eigen::VectorXd ys = rect.positions.row(1).transpose();
  CHECK(ys.maxCoeff() - ys.minCoeff() == doctest::Approx(3 * eta * a));

  const auto honey = make_honeycomb_lattice(3, 3, a);
  CHECK(honey.n() == 18);
  CHECK(min_pair_distance(honey) == doctest::Approx(a).epsilon(1e-12));

  CHECK_THROWS_AS(make_square_lattice(0, 3, a), std::invalid_argument);
  CHECK_THROWS_AS(make_rectangular_lattice(2, 2, a, 0.0), std::invalid_argument);
}

TEST_CASE("ring geometry") {
  const int n = 12;
  const double radius = 2.5;
  const auto ring = make_ring(n, radius);
  CHECK(ring.n() == n);
  const double chord = 2.0 * radius * std::sin(kPi / n);
  CHECK(min_pair_distance(ring) == doctest::Approx(chord).epsilon(1e-12));
  for (int i = 0; i < n; ++i)
    CHECK(ring.positions.col(i).head<2>().norm() ==
          doctest::Approx(radius).epsilon(1e-12));
}

TEST_CASE("min_pair_distance matches brute force on a random cloud") {
  const auto cloud = make_gaussian_cloud(150, Vec3(1.0, 1.0, 1.0), 11);
  CHECK(min_pair_distance(cloud) == doctest::Approx(brute_min_distance(cloud)).epsilon(1e-14));
  CHECK_THROWS_AS(min_pair_distance(make_chain(1, 1.0)), std::invalid_argument);
}

TEST_CASE("polarization specs") {
  const auto lin = PolarizationSpec::linear(Vec3(0.0, 0.0, 2.0));
  CHECK(lin.axis.norm() == doctest::Approx(1.0));
  CHECK(lin.axis[2] == doctest::Approx(1.0));
  CHECK_THROWS_AS(PolarizationSpec::linear(Vec3::Zero()), std::invalid_argument);
  CHECK(PolarizationSpec::sigma_plus().mode == PolarizationSpec::Mode::sigma_plus);
  CHECK(PolarizationSpec::v_type().mode == PolarizationSpec::Mode::v_type);
}
