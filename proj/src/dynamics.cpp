#include "pmddi/dynamics.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pmddi {

void validate_drive(const DriveSpec& drive, int n_atoms) {
  if (drive.phases.size() != n_atoms)
    throw std::invalid_argument("drive phase profile size mismatch");
  if (drive.rabi < 0) throw std::invalid_argument("rabi must be >= 0");
  for (int i = 0; i < n_atoms; ++i)
    if (std::abs(drive.phases[i]) > 1.0 + 1e-12)
      throw std::invalid_argument("drive phase profile must satisfy |phase| <= 1");
}

DriveSpec undriven(int n_atoms, double detuning) {
  return {0.0, detuning, Eigen::VectorXcd::Zero(n_atoms)};
}

DriveSpec plane_wave_drive(const AtomEnsemble& ensemble, double rabi,
                           double detuning, const Vec3& k_hat) {
  const double norm = k_hat.norm();
  if (norm < 1e-12) throw std::invalid_argument("propagation direction must be nonzero");
  const Vec3 k = k_hat / norm;
  DriveSpec d{rabi, detuning, Eigen::VectorXcd(ensemble.n())};
  for (int i = 0; i < ensemble.n(); ++i)
    d.phases[i] = std::exp(kI * k.dot(ensemble.positions.col(i)));
  return d;
}

Complex paraxial_mode(const Vec3& r, double waist) {
  if (waist <= 0) throw std::invalid_argument("waist must be > 0");
  const double zr = 0.5 * waist * waist;  // Rayleigh range, k_L = 1
  const double z = r.z();
  const double rho2 = r.x() * r.x() + r.y() * r.y();
  const double w2 = waist * waist * (1.0 + (z / zr) * (z / zr));
  const double amp = waist / std::sqrt(w2) * std::exp(-rho2 / w2);
  // Wavefront curvature and Gouy terms; both vanish in the focal plane.
  const double phase = 0.5 * rho2 * z / (z * z + zr * zr) - std::atan(z / zr);
  return amp * std::exp(kI * phase);
}

DriveSpec gaussian_beam_drive(const AtomEnsemble& ensemble, double rabi,
                              double detuning, double waist) {
  DriveSpec d{rabi, detuning, Eigen::VectorXcd(ensemble.n())};
  for (int i = 0; i < ensemble.n(); ++i) {
    const Vec3 r = ensemble.positions.col(i);
    d.phases[i] = paraxial_mode(r, waist) * std::exp(kI * r.z());
  }
  return d;
}

DriveSpec guided_drive(const AtomEnsemble& ensemble, double rabi,
                       double detuning) {
  const Eigen::VectorXd x = waveguide_coordinates(ensemble);
  DriveSpec d{rabi, detuning, Eigen::VectorXcd(ensemble.n())};
  for (int i = 0; i < ensemble.n(); ++i) d.phases[i] = std::exp(kI * x[i]);
  return d;
}

Eigen::MatrixXcd build_evolution_matrix(const CouplingMatrix& coupling,
                                        double detuning) {
  Eigen::MatrixXcd m = -coupling.J;
  m.diagonal().array() += kI * detuning;
  return m;
}

Eigen::VectorXcd drive_vector(const DriveSpec& drive) {
  return (0.5 * drive.rabi * kI) * drive.phases;
}

EigenmodeSet eigenmodes(const CouplingMatrix& coupling, bool with_modes) {
  const int n = coupling.n();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(coupling.J, with_modes);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigensolver failed to converge on " << n << "x" << n
        << " coupling matrix (|J|_max = " << coupling.J.cwiseAbs().maxCoeff() << ")";
    throw NumericalError(msg.str());
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& ev = solver.eigenvalues();
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return ev[a].real() < ev[b].real(); });

  EigenmodeSet out;
  out.eigenvalues.resize(n);
  out.rates.resize(n);
  out.shifts.resize(n);
  if (with_modes) out.modes.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const Complex lambda = ev[order[i]];
    out.eigenvalues[i] = lambda;
    out.rates[i] = 2.0 * lambda.real();
    out.shifts[i] = -lambda.imag();
    if (with_modes) out.modes.col(i) = solver.eigenvectors().col(order[i]);
  }
  return out;
}

DipoleState steady_state(const CouplingMatrix& coupling, const DriveSpec& drive) {
  const int n = coupling.n();
  validate_drive(drive, n);
  const Eigen::VectorXcd d = drive_vector(drive);
  Eigen::MatrixXcd a = coupling.J;
  a.diagonal().array() -= kI * drive.detuning;

  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  Eigen::VectorXcd b = lu.solve(d);
  double residual = (a * b - d).norm();
  const double dnorm = d.norm();
  const bool bad_solve =
      !b.allFinite() || residual > 1e-10 * std::max(dnorm, 1e-300);
  // A backward-stable solve keeps the residual small even at an exactly
  // critical point, so near-singularity has to be probed through the
  // condition estimate, not the residual.
  if (bad_solve || lu.rcond() < 1e-10) {
    const EigenmodeSet modes = eigenmodes(coupling, false);
    int worst = 0;
    double scale = 0.0;
    for (int i = 0; i < n; ++i) {
      scale = std::max(scale, std::abs(modes.eigenvalues[i]));
      if (std::abs(modes.eigenvalues[i] - kI * drive.detuning) <
          std::abs(modes.eigenvalues[worst] - kI * drive.detuning))
        worst = i;
    }
    const double dist = std::abs(modes.eigenvalues[worst] - kI * drive.detuning);
    if (dist <= 1e-12 * std::max(scale, std::abs(drive.detuning))) {
      // Steady state nonexistent or nonunique: a mode sits at the drive
      // frequency. Reported as criticality regardless of drive overlap.
      std::ostringstream msg;
      msg << "steady-state system is singular: eigenvalue ("
          << modes.eigenvalues[worst].real() << ", "
          << modes.eigenvalues[worst].imag()
          << ") coincides with i*Delta = (0, " << drive.detuning << ")";
      throw SingularSystemError(msg.str(), modes.eigenvalues[worst]);
    }
    if (bad_solve) {
      b = a.colPivHouseholderQr().solve(d);
      residual = (a * b - d).norm();
      if (!b.allFinite() || residual > 1e-10 * std::max(dnorm, 1e-300)) {
        std::ostringstream msg;
        msg << "steady-state solve failed: residual " << residual
            << " for |d| = " << dnorm << ", nearest eigenvalue distance "
            << dist;
        throw SingularSystemError(msg.str(), modes.eigenvalues[worst]);
      }
    }
  }
  return {b, std::numeric_limits<double>::infinity()};
}

Trajectory evolve(const CouplingMatrix& coupling, const DriveSpec& drive,
                  const Eigen::VectorXcd& b0, const Eigen::VectorXd& times) {
  const int n = coupling.n();
  validate_drive(drive, n);
  if (b0.size() != n) throw std::invalid_argument("initial state size mismatch");
  if (times.size() < 1) throw std::invalid_argument("need at least one time point");
  for (int t = 1; t < times.size(); ++t)
    if (times[t] <= times[t - 1])
      throw std::invalid_argument("time grid must be strictly increasing");

  const Eigen::MatrixXcd m = build_evolution_matrix(coupling, drive.detuning);
  const Eigen::VectorXcd d = drive_vector(drive);

  // Constant drive folds into an augmented linear system; its exponential
  // propagates exactly, so accuracy is independent of step size.
  Eigen::MatrixXcd aug = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = m;
  aug.topRightCorner(n, 1) = d;

  Trajectory out;
  out.times = times;
  out.b.resize(times.size(), n);
  out.b.row(0) = b0.transpose();

  Eigen::VectorXcd state(n + 1);
  state.head(n) = b0;
  state[n] = 1.0;
  double cached_h = -1.0;
  Eigen::MatrixXcd propagator;
  for (int t = 1; t < times.size(); ++t) {
    const double h = times[t] - times[t - 1];
    if (std::abs(h - cached_h) > 1e-15 * std::max(1.0, h)) {
      propagator = (aug * h).exp();
      cached_h = h;
    }
    state = propagator * state;
    out.b.row(t) = state.head(n).transpose();
  }
  return out;
}

double emitted_power(const CouplingMatrix& coupling, const Eigen::VectorXcd& b) {
  if (!coupling.reciprocal)
    throw UnsupportedConfigError(
        "emitted power is defined for reciprocal couplings only");
  if (b.size() != coupling.n()) throw std::invalid_argument("state size mismatch");
  const Complex p = b.adjoint() * (2.0 * coupling.J.real()).cast<Complex>() * b;
  return p.real();
}

}  // namespace pmddi
