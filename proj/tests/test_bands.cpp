#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "pmddi/bands.hpp"
#include "pmddi/geometry.hpp"
#include "pmddi/kernel.hpp"

using namespace pmddi;

namespace {

// Independent reference: assemble H(k) from the 3x3 tensor kernel and the
// explicit circular polarization vectors, summing raw lattice translations.
// Shares no code with the module under test beyond the kernel primitives.
Eigen::MatrixXcd brute_bloch(const LatticeSpec2D& spec, const Vec2& k,
                             double r_cut) {
  const auto bv = spec.bravais();
  const auto offsets = spec.basis();
  std::vector<Eigen::Vector3cd> pol;
  std::vector<double> dz;
  if (spec.levels == LevelScheme::v_type) {
    pol.push_back(polarization_vector(PolarizationSpec::sigma_plus()));
    pol.push_back(polarization_vector(PolarizationSpec::sigma_minus()));
    dz = {spec.zeeman, -spec.zeeman};
  } else if (spec.levels == LevelScheme::sigma_plus) {
    pol.push_back(polarization_vector(PolarizationSpec::sigma_plus()));
    dz = {spec.zeeman};
  } else {
    pol.push_back(polarization_vector(PolarizationSpec::sigma_minus()));
    dz = {-spec.zeeman};
  }
  const int ns = static_cast<int>(offsets.size());
  const int nl = static_cast<int>(pol.size());
  const int dim = ns * nl;
  const double amin = std::min(bv[0].norm(), bv[1].norm());
  const int m = static_cast<int>(std::ceil(r_cut / amin)) + 3;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int s = 0; s < ns; ++s)
    for (int sp = 0; sp < ns; ++sp)
      for (int n1 = -m; n1 <= m; ++n1)
        for (int n2 = -m; n2 <= m; ++n2) {
          const Vec2 lat = n1 * bv[0] + n2 * bv[1];
          const Vec2 r2 = lat + offsets[s] - offsets[sp];
          const double radius = r2.norm();
          if (radius < 1e-12 * spec.a || radius > r_cut * (1.0 + 1e-12)) continue;
          const Vec3 r3(r2.x(), r2.y(), 0.0);
          const Eigen::Matrix3cd kern =
              free_space_tensor_kernel(r3, spec.gamma_total);
          const Complex phase = std::polar(1.0, k.dot(lat));
          for (int a = 0; a < nl; ++a)
            for (int b = 0; b < nl; ++b) {
              const Complex j = (pol[a].adjoint() * kern * pol[b])(0);
              h(s * nl + a, sp * nl + b) += phase * (-kI) * std::conj(j);
            }
        }
  for (int s = 0; s < ns; ++s)
    for (int l = 0; l < nl; ++l)
      h(s * nl + l, s * nl + l) += Complex(dz[l], -0.5 * spec.gamma_total);
  return h;
}

LatticeSpec2D honeycomb_spec(double zeeman = 0.0) {
  LatticeSpec2D spec;
  spec.kind = LatticeKind::honeycomb;
  spec.levels = LevelScheme::v_type;
  spec.zeeman = zeeman;
  return spec;
}

}  // namespace

TEST_CASE("Bloch matrix matches a brute-force tensor-kernel sum") {
  const double r_cut = 10.5 * (0.05 * kTwoPi);
  // Honeycomb, V-type, finite Zeeman.
  {
    auto spec = honeycomb_spec(3.0);
    for (const Vec2& k : {Vec2(0.3, -0.8), Vec2(1.7, 2.2)}) {
      const Eigen::MatrixXcd a = bloch_hamiltonian(spec, k, r_cut);
      const Eigen::MatrixXcd b = brute_bloch(spec, k, r_cut);
      REQUIRE(a.rows() == 4);
      CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  // Rectangular, single sigma- level.
  {
    LatticeSpec2D spec;
    spec.kind = LatticeKind::rectangular;
    spec.eta = 1.1;
    spec.levels = LevelScheme::sigma_minus;
    spec.zeeman = 1.5;
    const Vec2 k(0.9, 0.4);
    const Eigen::MatrixXcd a = bloch_hamiltonian(spec, k, r_cut);
    const Eigen::MatrixXcd b = brute_bloch(spec, k, r_cut);
    REQUIRE(a.rows() == 1);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("Bloch matrix is exactly periodic in reciprocal translations") {
  auto spec = honeycomb_spec(1.0);
  const double r_cut = 12.0 * spec.a;
  const auto rec = spec.reciprocal();
  const Vec2 k(0.37, -0.55);
  const Eigen::MatrixXcd h0 = bloch_hamiltonian(spec, k, r_cut);
  for (const Vec2& g : {rec[0], rec[1], (3.0 * rec[0] - 2.0 * rec[1]).eval()}) {
    const Eigen::MatrixXcd hg = bloch_hamiltonian(spec, (k + g).eval(), r_cut);
    CHECK((h0 - hg).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("reciprocal vectors are dual to the Bravais vectors") {
  for (auto kind : {LatticeKind::square, LatticeKind::rectangular,
                    LatticeKind::honeycomb}) {
    LatticeSpec2D spec;
    spec.kind = kind;
    spec.eta = 1.2;
    const auto a = spec.bravais();
    const auto b = spec.reciprocal();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(a[i].dot(b[j]) == doctest::Approx(i == j ? kTwoPi : 0.0).epsilon(1e-12));
  }
}

TEST_CASE("honeycomb high-symmetry points") {
  auto spec = honeycomb_spec();
  const double a0 = std::sqrt(3.0) * spec.a;  // Bravais lattice constant
  const auto pts = high_symmetry_points(spec);
  CHECK(pts.gamma.norm() == 0.0);
  CHECK(pts.k.norm() == doctest::Approx(4.0 * kPi / (3.0 * a0)).epsilon(1e-12));
  CHECK(pts.k_prime.norm() == doctest::Approx(pts.k.norm()).epsilon(1e-12));
  // K and K' are inequivalent: their difference is not a reciprocal vector
  // multiple, but |K - K'| = |K| here.
  CHECK((pts.k - pts.k_prime).norm() > 1e-6);
  const auto path = high_symmetry_path(spec, 10);
  CHECK(path.size() == 31);
  CHECK((path.front() - pts.gamma).norm() < 1e-14);
  CHECK((path.back() - pts.gamma).norm() < 1e-14);
}

TEST_CASE("zero-field honeycomb bands touch at Gamma and K") {
  auto spec = honeycomb_spec();
  const double r_cut = 20.0 * spec.a;
  const auto pts = high_symmetry_points(spec);

  // At Gamma the point group forces two exact doublets; the Re-sort may
  // interleave distinct pairs, so test all perfect matchings of the complex
  // values.
  {
    const auto bands = band_structure(spec, {pts.gamma}, r_cut);
    REQUIRE(bands.eigenvalues.cols() == 4);
    const auto row = bands.eigenvalues.row(0);
    auto pairing = [&](int a, int b, int c, int d) {
      return std::max(std::abs(row[a] - row[b]), std::abs(row[c] - row[d]));
    };
    const double best = std::min(
        {pairing(0, 1, 2, 3), pairing(0, 2, 1, 3), pairing(0, 3, 1, 2)});
    CHECK(best < 1e-3);
  }

  // At K only the two middle bands meet (the Dirac point); the outer bands
  // are split singlets. Require one degenerate pair among the four levels.
  {
    const auto bands = band_structure(spec, {pts.k}, r_cut);
    const auto row = bands.eigenvalues.row(0);
    double closest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        closest = std::min(closest, std::abs(row[i] - row[j]));
    CHECK(closest < 1e-3);
  }
}

TEST_CASE("Zeeman field opens a monotonically growing gap at K") {
  auto spec = honeycomb_spec();
  const double r_cut = 20.0 * spec.a;
  const Vec2 kpt = high_symmetry_points(spec).k;
  double prev = -1.0;
  for (double b : {0.0, 0.5, 1.0, 2.0}) {
    spec.zeeman = b;
    const auto bands = band_structure(spec, {kpt}, r_cut);
    // Smallest splitting among adjacent (Re-sorted) shifts.
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < 4; ++i)
      gap = std::min(gap, std::abs(bands.eigenvalues(0, i + 1) - bands.eigenvalues(0, i)));
    if (b == 0.0) CHECK(gap < 1e-3);
    CHECK(gap > prev);
    prev = gap;
  }
}

TEST_CASE("light-cone classification follows |k| < k_L") {
  auto spec = honeycomb_spec(2.0);
  const double r_cut = 12.0 * spec.a;
  const Vec2 inside(0.3, 0.2);
  const Vec2 outside(2.5, 1.0);
  const auto bands = band_structure(spec, {inside, outside}, r_cut);
  CHECK(bands.in_light_cone[0]);
  CHECK_FALSE(bands.in_light_cone[1]);
  CHECK(in_light_cone(inside));
  CHECK_FALSE(in_light_cone(outside));
}

TEST_CASE("doubling the cutoff stays within the reported tail bound") {
  auto spec = honeycomb_spec(1.0);
  const double r1 = 15.0 * spec.a, r2 = 30.0 * spec.a;
  const Vec2 k = high_symmetry_points(spec).m;
  const auto b1 = band_structure(spec, {k}, r1);
  const auto b2 = band_structure(spec, {k}, r2);
  CHECK(b1.tail_bound > 0.0);
  for (int i = 0; i < 4; ++i) {
    const double drift = std::abs(b1.eigenvalues(0, i) - b2.eigenvalues(0, i));
    CHECK(drift <= b1.tail_bound);
  }
}

TEST_CASE("validation rejects undersized cutoffs and bad parameters") {
  auto spec = honeycomb_spec();
  CHECK_THROWS_AS(bloch_hamiltonian(spec, Vec2(0, 0), 5.0 * spec.a),
                  std::invalid_argument);
  spec.a = -1.0;
  CHECK_THROWS_AS(spec.validate(1.0), std::invalid_argument);
}

TEST_CASE("zero-field honeycomb has no gapped grouping") {
  auto spec = honeycomb_spec();
  try {
    chern_numbers(spec, 8, 15.0 * spec.a);
    FAIL("expected GaplessBandError");
  } catch (const GaplessBandError& e) {
    CHECK(e.gap < 1e-6);
    CHECK(std::isfinite(e.k_touch.x()));
  }
}

TEST_CASE("gapped honeycomb: integer Chern numbers, opposite pairs, zero sum") {
  auto spec = honeycomb_spec(12.0);
  const double r_cut = 25.0 * spec.a;
  const auto c12 = chern_numbers(spec, 12, r_cut);
  const auto c18 = chern_numbers(spec, 18, r_cut);
  REQUIRE(c12.groups.size() >= 2);
  // Grid-size stability of the grouping and the integers.
  REQUIRE(c12.groups == c18.groups);
  CHECK(c12.chern == c18.chern);
  // Frozen regression values; stable from r_cut = 15a to 60a and from
  // 12 x 12 to 40 x 40 grids.
  CHECK(c12.chern == std::vector<int>{-2, 3, 0, -1});
  int sum = 0;
  for (std::size_t g = 0; g < c12.chern.size(); ++g) {
    sum += c12.chern[g];
    CHECK(c12.residuals[g] < 1e-6);
  }
  CHECK(sum == 0);
  CHECK(c12.min_intergroup_gap > 1e-6);
  // Single-band lookup agrees with the grouped result.
  CHECK(chern_number(spec, 0, 12, r_cut) == c12.chern.front());
  const int last_band = 3;
  CHECK(chern_number(spec, last_band, 12, r_cut) == c12.chern.back());
}

TEST_CASE("ribbon matches a brute-force strip Hamiltonian") {
  LatticeSpec2D spec;
  spec.kind = LatticeKind::rectangular;
  spec.eta = 1.3;
  spec.levels = LevelScheme::sigma_plus;
  spec.zeeman = 0.7;
  const int width = 5;
  const double r_cut = 10.5 * spec.a;
  const double k_par = 0.23 / spec.a;

  const auto bv = spec.bravais();
  const Vec2 u = bv[0] + bv[1];
  const Vec2 v = bv[0] - bv[1];
  const auto ep = polarization_vector(PolarizationSpec::sigma_plus());
  const int n = 2 * width;
  const int cmax = static_cast<int>(std::ceil(r_cut / spec.a)) + 2 * width + 2;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (int l = 0; l < width; ++l)
    for (int s = 0; s < 2; ++s)
      for (int lp = 0; lp < width; ++lp)
        for (int sp = 0; sp < 2; ++sp) {
          Complex acc = 0.0;
          for (int c = -cmax; c <= cmax; ++c) {
            const Vec2 r2 = c * u + double(l - lp) * v + double(s - sp) * bv[0];
            const double radius = r2.norm();
            if (radius < 1e-12 * spec.a || radius > r_cut) continue;
            const Vec3 r3(r2.x(), r2.y(), 0.0);
            const Complex j =
                (ep.adjoint() * free_space_tensor_kernel(r3, spec.gamma_total) * ep)(0);
            acc += std::polar(1.0, k_par * u.norm() * c) * (-kI) * std::conj(j);
          }
          if (l == lp && s == sp) acc += Complex(spec.zeeman, -0.5 * spec.gamma_total);
          h(2 * l + s, 2 * lp + sp) = acc;
        }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h, false);
  Eigen::VectorXcd want = es.eigenvalues();
  std::sort(want.data(), want.data() + n, [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  const auto ribbon = ribbon_spectrum(spec, width, k_par, r_cut);
  REQUIRE(ribbon.eigenvalues.size() == n);
  for (int i = 0; i < n; ++i)
    CHECK(std::abs(ribbon.eigenvalues[i] - want[i]) < 1e-9);
}

TEST_CASE("square ribbon at k_par = 0 is transversely balanced") {
  LatticeSpec2D spec;
  spec.kind = LatticeKind::square;
  spec.levels = LevelScheme::sigma_plus;
  const int width = 24;
  const auto ribbon = ribbon_spectrum(spec, width, 0.0, 12.0 * spec.a);
  CHECK(ribbon.eigenvalues.size() == 2 * width);
  // Mirror symmetry: the mode-averaged center of mass sits at the middle.
  CHECK(ribbon.com.mean() == doctest::Approx(0.5).epsilon(0.02));
  for (int i = 0; i < ribbon.com.size(); ++i) {
    CHECK(ribbon.com[i] >= 0.0);
    CHECK(ribbon.com[i] <= 1.0);
    CHECK(ribbon.ipr[i] >= 1.0 / (2.0 * width) - 1e-12);
    CHECK(ribbon.ipr[i] <= 1.0 + 1e-12);
  }
}

TEST_CASE("ribbon configuration guards") {
  LatticeSpec2D spec;
  spec.kind = LatticeKind::rectangular;
  spec.eta = 1.1;
  spec.levels = LevelScheme::sigma_plus;
  CHECK_THROWS_AS(ribbon_spectrum(spec, 3, 0.0, 12.0 * spec.a),
                  std::invalid_argument);
  CHECK_THROWS_AS(ribbon_spectrum(spec, 5000, 0.0, 12.0 * spec.a), CapacityError);
  spec.levels = LevelScheme::v_type;
  CHECK_THROWS_AS(ribbon_spectrum(spec, 10, 0.0, 12.0 * spec.a),
                  UnsupportedConfigError);
  auto honey = honeycomb_spec();
  honey.levels = LevelScheme::sigma_plus;
  CHECK_THROWS_AS(ribbon_spectrum(honey, 10, 0.0, 12.0 * honey.a),
                  UnsupportedConfigError);
}
