#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pmddi/dynamics.hpp"
#include "pmddi/geometry.hpp"
#include "pmddi/kernel.hpp"

using namespace pmddi;

namespace {

CouplingMatrix single_atom(double gamma = 1.0) {
  CouplingMatrix c;
  c.J = Eigen::MatrixXcd::Constant(1, 1, Complex(0.5 * gamma, 0.0));
  c.total_rate = gamma;
  return c;
}

DriveSpec uniform_drive(int n, double rabi, double detuning) {
  DriveSpec d;
  d.rabi = rabi;
  d.detuning = detuning;
  d.phases = Eigen::VectorXcd::Ones(n);
  return d;
}

}  // namespace

TEST_CASE("single atom: unit decay rate and resonant steady amplitude") {
  const auto c = single_atom();
  const auto modes = eigenmodes(c);
  CHECK(modes.rates[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(modes.shifts[0]) < 1e-14);

  const double rabi = 0.02;
  const auto ss = steady_state(c, uniform_drive(1, rabi, 0.0));
  // (Gamma/2) b = i Omega/2  =>  b = i Omega / Gamma.
  CHECK(std::abs(ss.b[0] - Complex(0.0, rabi)) < 1e-14);

  // Detuned closed form b = (i Omega/2) / (Gamma/2 - i Delta).
  const double delta = 0.37;
  const auto ssd = steady_state(c, uniform_drive(1, rabi, delta));
  const Complex want = Complex(0.0, 0.5 * rabi) / Complex(0.5, -delta);
  CHECK(std::abs(ssd.b[0] - want) < 1e-14);
}

TEST_CASE("two-atom eigensystem matches the closed-form 2x2 solution") {
  const double xi = 1.3;
  const auto pair = make_chain(2, xi);
  const auto pol = PolarizationSpec::linear(Vec3::UnitZ());  // c = 0
  const auto coupling = free_space_coupling(pair, pol);
  const auto k = free_space_pair(xi, 0.0);
  const Complex g(0.5 * k.gamma, k.omega);

  // J = [[G/2, g], [g, G/2]] has eigenpairs G/2 +- g on (1, +-1)/sqrt(2).
  const auto modes = eigenmodes(coupling);
  Eigen::Vector2cd want_vals(Complex(0.5, 0.0) - g, Complex(0.5, 0.0) + g);
  if (want_vals[0].real() > want_vals[1].real()) std::swap(want_vals[0], want_vals[1]);
  CHECK(std::abs(modes.eigenvalues[0] - want_vals[0]) < 1e-12);
  CHECK(std::abs(modes.eigenvalues[1] - want_vals[1]) < 1e-12);
  CHECK(modes.rates[0] == doctest::Approx(2.0 * want_vals[0].real()).epsilon(1e-12));
  CHECK(modes.shifts[1] == doctest::Approx(-want_vals[1].imag()).epsilon(1e-12));
  // Eigenvectors are the symmetric/antisymmetric combinations.
  for (int m = 0; m < 2; ++m) {
    const Eigen::Vector2cd v = modes.modes.col(m);
    CHECK(std::abs(std::abs(v[0]) - std::abs(v[1])) < 1e-10);
  }
}

TEST_CASE("steady state satisfies its linear system") {
  const auto cloud = make_gaussian_cloud(30, Vec3(2.0, 2.0, 2.0), 21);
  const auto coupling =
      free_space_coupling(cloud, PolarizationSpec::linear(Vec3::UnitX()));
  const auto drive = plane_wave_drive(cloud, 0.01, 0.4);
  const auto ss = steady_state(coupling, drive);
  Eigen::MatrixXcd a = coupling.J;
  a.diagonal().array() -= kI * drive.detuning;
  const Eigen::VectorXcd d = drive_vector(drive);
  CHECK((a * ss.b - d).norm() <= 1e-10 * d.norm());
}

TEST_CASE("exactly singular systems are reported as critical") {
  // D = 0 waveguide chain at half-wavelength spacing: J is rank one with an
  // (N-1)-fold zero eigenvalue at resonance.
  const auto chain = make_chain(2, kPi);
  const auto coupling = waveguide_coupling(chain, ChiralSpec{});

  // Drive with weight on the dark mode: no steady state exists.
  DriveSpec dark = uniform_drive(2, 0.01, 0.0);
  CHECK_THROWS_AS(steady_state(coupling, dark), SingularSystemError);
  try {
    steady_state(coupling, dark);
  } catch (const SingularSystemError& e) {
    CHECK(std::abs(e.eigenvalue) < 1e-10);
  }

  // Even a consistent drive (pure bright mode) is rejected: the steady state
  // is not unique at a critical point.
  DriveSpec bright = uniform_drive(2, 0.01, 0.0);
  bright.phases << 1.0, -1.0;
  CHECK_THROWS_AS(steady_state(coupling, bright), SingularSystemError);

  // Slightly off the critical spacing everything is regular again.
  const auto near = waveguide_coupling(make_chain(2, kPi * 1.01), ChiralSpec{});
  CHECK_NOTHROW(steady_state(near, uniform_drive(2, 0.01, 0.0)));
}

TEST_CASE("evolution matches the eigenmode expansion") {
  const auto cloud = make_gaussian_cloud(6, Vec3(1.5, 1.5, 1.5), 33);
  const auto coupling =
      free_space_coupling(cloud, PolarizationSpec::linear(Vec3::UnitZ()));
  const auto modes = eigenmodes(coupling);

  std::mt19937_64 rng(2);
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd b0(6);
  for (int i = 0; i < 6; ++i) b0[i] = Complex(gauss(rng), gauss(rng));
  b0 /= b0.norm();

  Eigen::VectorXd times(4);
  times << 0.0, 0.3, 1.1, 2.7;
  const auto traj = evolve(coupling, undriven(6), b0, times);
  CHECK((traj.b.row(0).transpose() - b0).norm() < 1e-15);

  // Independent reconstruction: expand b0 in right eigenvectors and damp each
  // component with exp(-lambda_n t).
  const Eigen::VectorXcd coef = modes.modes.colPivHouseholderQr().solve(b0);
  for (int t = 1; t < times.size(); ++t) {
    Eigen::VectorXcd want = Eigen::VectorXcd::Zero(6);
    for (int m = 0; m < 6; ++m)
      want += coef[m] * std::exp(-modes.eigenvalues[m] * times[t]) * modes.modes.col(m);
    CHECK((traj.b.row(t).transpose() - want).norm() < 1e-9);
  }
}

TEST_CASE("driven evolution relaxes to the steady state") {
  // Dilute cloud: all modes decay at O(Gamma), so t = 100 is deep in the
  // stationary regime.
  const auto cloud = make_gaussian_cloud(8, Vec3(4.0, 4.0, 4.0), 4);
  const auto coupling =
      free_space_coupling(cloud, PolarizationSpec::linear(Vec3::UnitX()));
  const auto drive = plane_wave_drive(cloud, 0.005, -0.2);
  const auto ss = steady_state(coupling, drive);
  Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(5, 0.0, 100.0);
  const auto traj = evolve(coupling, drive, Eigen::VectorXcd::Zero(8), times);
  CHECK((traj.b.row(4).transpose() - ss.b).norm() < 1e-8 * ss.b.norm());
}

TEST_CASE("emitted power balances the population loss rate") {
  const auto cloud = make_gaussian_cloud(5, Vec3(0.8, 0.8, 0.8), 17);
  const auto coupling =
      free_space_coupling(cloud, PolarizationSpec::linear(Vec3::UnitY()));
  std::mt19937_64 rng(9);
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd b0(5);
  for (int i = 0; i < 5; ++i) b0[i] = Complex(gauss(rng), gauss(rng));
  b0 /= 2.0 * b0.norm();

  const double t = 0.4, h = 1e-4;
  Eigen::VectorXd times(4);
  times << 0.0, t - h, t, t + h;
  const auto traj = evolve(coupling, undriven(5), b0, times);
  const double p_before = traj.b.row(1).squaredNorm();
  const double p_after = traj.b.row(3).squaredNorm();
  const double fd = -(p_after - p_before) / (2.0 * h);
  const double power = emitted_power(coupling, traj.b.row(2).transpose());
  CHECK(power == doctest::Approx(fd).epsilon(1e-6));
  CHECK(power > 0.0);
}

TEST_CASE("emitted power rejects chiral couplings") {
  const auto chain = make_chain(3, 1.0);
  ChiralSpec spec;
  spec.d_factor = 0.5;
  const auto coupling = waveguide_coupling(chain, spec);
  CHECK_THROWS_AS(emitted_power(coupling, Eigen::VectorXcd::Ones(3)), UnsupportedConfigError);
}

TEST_CASE("drive profiles") {
  const auto cloud = make_gaussian_cloud(40, Vec3(1.0, 1.0, 3.0), 5);

  const auto pw = plane_wave_drive(cloud, 0.01, 0.0);
  for (int i = 0; i < 40; ++i) {
    CHECK(std::abs(std::abs(pw.phases[i]) - 1.0) < 1e-14);
    const Complex want = std::polar(1.0, cloud.positions(2, i));
    CHECK(std::abs(pw.phases[i] - want) < 1e-14);
  }

  // Oblique propagation direction.
  const Vec3 khat = Vec3(1.0, 1.0, 1.0).normalized();
  const auto obl = plane_wave_drive(cloud, 0.01, 0.0, khat);
  CHECK(std::abs(obl.phases[7] - std::polar(1.0, khat.dot(cloud.positions.col(7)))) < 1e-14);

  const double w0 = 6.0;
  const auto gb = gaussian_beam_drive(cloud, 0.01, 0.0, w0);
  for (int i = 0; i < 40; ++i)
    CHECK(std::abs(gb.phases[i]) <= 1.0 + 1e-12);

  // Paraxial envelope: unit on axis at focus, w0/w(z) on axis downstream.
  CHECK(std::abs(paraxial_mode(Vec3::Zero(), w0) - Complex(1.0, 0.0)) < 1e-14);
  const double z = 10.0, zr = 0.5 * w0 * w0;
  const double wz = w0 * std::sqrt(1.0 + (z / zr) * (z / zr));
  CHECK(std::abs(paraxial_mode(Vec3(0, 0, z), w0)) == doctest::Approx(w0 / wz).epsilon(1e-12));

  DriveSpec bad = uniform_drive(3, 0.01, 0.0);
  bad.phases[1] = Complex(1.5, 0.0);
  CHECK_THROWS_AS(validate_drive(bad, 3), std::invalid_argument);
  CHECK_THROWS_AS(validate_drive(uniform_drive(3, 0.01, 0.0), 4), std::invalid_argument);
}

TEST_CASE("evolve validates its time grid") {
  const auto c = single_atom();
  Eigen::VectorXd bad(3);
  bad << 0.0, 1.0, 0.5;
  CHECK_THROWS_AS(evolve(c, undriven(1), Eigen::VectorXcd::Zero(1), bad),
                  std::invalid_argument);
}
