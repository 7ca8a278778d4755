#include "pmddi/lindblad.hpp"

#include <Eigen/SparseCore>

#include <cmath>
#include <sstream>
#include <vector>

namespace pmddi {

namespace {

using SparseC = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;

void check_capacity(int n) {
  if (n < 1) throw std::invalid_argument("need at least one atom");
  if (n > kMaxExactAtoms) {
    std::ostringstream msg;
    msg << "exact solver capped at " << kMaxExactAtoms << " atoms (got " << n
        << "); use the coupled-dipole model or a cumulant approximation";
    throw CapacityError(msg.str());
  }
}

SparseC lowering_operator(int n, int mu) {
  const int dim = 1 << n;
  const int bit = 1 << mu;
  std::vector<Triplet> trip;
  trip.reserve(dim / 2);
  for (int s = 0; s < dim; ++s)
    if (s & bit) trip.emplace_back(s ^ bit, s, 1.0);
  SparseC op(dim, dim);
  op.setFromTriplets(trip.begin(), trip.end());
  return op;
}

struct LindbladOperators {
  int n = 0;
  int dim = 0;
  SparseC h_nh;                 // H - (i/2) sum gamma sigma^dag sigma
  std::vector<SparseC> jumps;   // scaled collective jump operators
};

// Assembles the effective Hamiltonian and jump operators from J. gamma and
// Omega are the Hermitian decay/shift matrices J + J^dag and (J - J^dag)/2i.
LindbladOperators build_operators(const CouplingMatrix& coupling,
                                  const DriveSpec& drive) {
  const int n = coupling.n();
  check_capacity(n);
  validate_drive(drive, n);
  const int dim = 1 << n;

  const Eigen::MatrixXcd gamma = coupling.J + coupling.J.adjoint();
  const Eigen::MatrixXcd omega = (coupling.J - coupling.J.adjoint()) / (2.0 * kI);

  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(dim) * (n * n / 2 + 2 * n + 1));
  for (int s = 0; s < dim; ++s) {
    Complex diag = 0.0;
    for (int mu = 0; mu < n; ++mu) {
      const int bmu = 1 << mu;
      if (s & bmu) {
        diag += -drive.detuning - 0.5 * kI * gamma(mu, mu);
        // sigma_mu term of the drive: |s> -> |s without mu>.
        trip.emplace_back(s ^ bmu, s,
                          -0.5 * drive.rabi * std::conj(drive.phases[mu]));
        // Excitation transfer nu -> mu for every empty mu.
        for (int nu = 0; nu < n; ++nu) {
          if (nu == mu || (s & (1 << nu))) continue;
          const int t = (s ^ bmu) | (1 << nu);
          trip.emplace_back(t, s, omega(nu, mu) - 0.5 * kI * gamma(nu, mu));
        }
      } else {
        // sigma_mu^dag term of the drive: |s> -> |s with mu>.
        trip.emplace_back(s | bmu, s, -0.5 * drive.rabi * drive.phases[mu]);
      }
    }
    trip.emplace_back(s, s, diag);
  }

  LindbladOperators ops;
  ops.n = n;
  ops.dim = dim;
  ops.h_nh.resize(dim, dim);
  ops.h_nh.setFromTriplets(trip.begin(), trip.end());

  // Diagonalize gamma to obtain independent decay channels.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gamma);
  if (es.info() != Eigen::Success)
    throw NumericalError("decay-matrix diagonalization failed");
  for (int j = 0; j < n; ++j) {
    const double k = es.eigenvalues()[j];
    if (k < -1e-9 * coupling.total_rate)
      throw NumericalError("decay matrix is not positive semidefinite");
    if (k <= 0) continue;
    SparseC c(dim, dim);
    for (int mu = 0; mu < n; ++mu) {
      const Complex w = std::conj(es.eigenvectors()(mu, j));
      if (std::abs(w) > 1e-15) c += w * lowering_operator(n, mu);
    }
    ops.jumps.push_back(std::sqrt(k) * c);
  }
  return ops;
}

Eigen::MatrixXcd rhs(const LindbladOperators& ops, const Eigen::MatrixXcd& rho) {
  // For Hermitian rho (an invariant of the flow and of all RK stage inputs),
  // -i(H rho - rho H^dag) = a + a^dag with a = -i H rho.
  const Eigen::MatrixXcd a = -kI * (ops.h_nh * rho);
  Eigen::MatrixXcd out = a + Eigen::MatrixXcd(a.adjoint());
  for (const auto& c : ops.jumps) {
    const Eigen::MatrixXcd cr = c * rho;
    out.noalias() += cr * Eigen::MatrixXcd(c.adjoint());
  }
  return out;
}

// Dormand-Prince 5(4) with elementary step control; integrates rho in place
// from t0 to t1.
void integrate_adaptive(const LindbladOperators& ops, Eigen::MatrixXcd& rho,
                        double t0, double t1, double rtol, double atol) {
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (t1 <= t0) return;
  double t = t0;
  double h = std::min(t1 - t0, 1e-2);
  Eigen::MatrixXcd k1 = rhs(ops, rho);
  int rejected_in_a_row = 0;
  while (t < t1) {
    h = std::min(h, t1 - t);
    const Eigen::MatrixXcd k2 = rhs(ops, rho + h * (a21 * k1));
    const Eigen::MatrixXcd k3 = rhs(ops, rho + h * (a31 * k1 + a32 * k2));
    const Eigen::MatrixXcd k4 = rhs(ops, rho + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Eigen::MatrixXcd k5 =
        rhs(ops, rho + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Eigen::MatrixXcd k6 = rhs(
        ops, rho + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Eigen::MatrixXcd ynew =
        rho + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Eigen::MatrixXcd k7 = rhs(ops, ynew);
    const Eigen::MatrixXcd err_mat =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double scale =
        atol + rtol * std::max(rho.cwiseAbs().maxCoeff(), ynew.cwiseAbs().maxCoeff());
    const double err = err_mat.cwiseAbs().maxCoeff() / scale;
    if (err <= 1.0) {
      t += h;
      rho = ynew;
      k1 = k7;  // FSAL
      rejected_in_a_row = 0;
    } else if (++rejected_in_a_row > 60) {
      throw ConvergenceError("master-equation integrator failed to find a stable step");
    }
    const double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    h *= std::min(5.0, std::max(0.2, factor));
    if (h < 1e-14 * std::max(1.0, std::abs(t)))
      throw ConvergenceError("master-equation integrator step size underflow");
  }
}

Eigen::MatrixXcd initial_density(const LindbladOperators& ops,
                                 const Eigen::MatrixXcd* rho0) {
  if (!rho0) return ground_density(ops.n);
  if (rho0->rows() != ops.dim || rho0->cols() != ops.dim)
    throw std::invalid_argument("initial density matrix has wrong dimension");
  if ((*rho0 - rho0->adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("initial density matrix must be Hermitian");
  return *rho0;
}

}  // namespace

Eigen::MatrixXcd ground_density(int n_atoms) {
  check_capacity(n_atoms);
  const int dim = 1 << n_atoms;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  rho(0, 0) = 1.0;
  return rho;
}

Eigen::MatrixXcd single_excitation_density(int n_atoms, int site) {
  check_capacity(n_atoms);
  if (site < 0 || site >= n_atoms)
    throw std::invalid_argument("excitation site out of range");
  const int dim = 1 << n_atoms;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  rho(1 << site, 1 << site) = 1.0;
  return rho;
}

LindbladResult exact_lindblad(const CouplingMatrix& coupling,
                              const DriveSpec& drive,
                              const Eigen::VectorXd& times,
                              const Eigen::MatrixXcd* rho0,
                              const LindbladOptions& options) {
  if (times.size() < 1) throw std::invalid_argument("need at least one time point");
  for (int t = 1; t < times.size(); ++t)
    if (times[t] <= times[t - 1])
      throw std::invalid_argument("time grid must be strictly increasing");

  const LindbladOperators ops = build_operators(coupling, drive);
  Eigen::MatrixXcd rho = initial_density(ops, rho0);

  LindbladResult out;
  out.times = times;
  out.sigma.resize(times.size(), ops.n);
  out.populations.resize(times.size(), ops.n);
  out.trace.resize(times.size());
  for (int t = 0; t < times.size(); ++t) {
    if (t > 0)
      integrate_adaptive(ops, rho, times[t - 1], times[t], options.rtol,
                         options.atol);
    out.sigma.row(t) = sigma_expectations(rho, ops.n).transpose();
    out.populations.row(t) = excited_populations(rho, ops.n).transpose();
    out.trace[t] = rho.trace().real();
  }
  out.rho_final = rho;
  return out;
}

Eigen::MatrixXcd exact_steady_state(const CouplingMatrix& coupling,
                                    const DriveSpec& drive,
                                    const LindbladOptions& options) {
  const LindbladOperators ops = build_operators(coupling, drive);
  const int dim = ops.dim;

  if (ops.n <= 5) {
    // Dense Liouvillian on vec(rho), column-major: L = -i (I (x) H_nh)
    // + i (conj(H_nh) (x) I) + sum_j conj(C_j) (x) C_j; the first row is
    // replaced by the trace normalization.
    const int d2 = dim * dim;
    const Eigen::MatrixXcd h = ops.h_nh.toDense();
    Eigen::MatrixXcd liouville = Eigen::MatrixXcd::Zero(d2, d2);
    auto add_kron = [&](const Eigen::MatrixXcd& left, const Eigen::MatrixXcd& right,
                        Complex w) {
      for (int bc = 0; bc < dim; ++bc)
        for (int br = 0; br < dim; ++br) {
          const Complex lv = left(br, bc);
          if (lv == Complex(0)) continue;
          liouville.block(br * dim, bc * dim, dim, dim) += (w * lv) * right;
        }
    };
    add_kron(Eigen::MatrixXcd::Identity(dim, dim), h, -kI);
    add_kron(h.conjugate(), Eigen::MatrixXcd::Identity(dim, dim), kI);
    for (const auto& c : ops.jumps) {
      const Eigen::MatrixXcd cd = c.toDense();
      add_kron(cd.conjugate(), cd, 1.0);
    }
    liouville.row(0).setZero();
    for (int i = 0; i < dim; ++i) liouville(0, i * dim + i) = 1.0;
    Eigen::VectorXcd rhs_vec = Eigen::VectorXcd::Zero(d2);
    rhs_vec[0] = 1.0;
    const Eigen::VectorXcd sol = liouville.partialPivLu().solve(rhs_vec);
    if (!sol.allFinite() || (liouville * sol - rhs_vec).norm() > 1e-8)
      throw NumericalError("steady Liouvillian solve failed (degenerate steady space?)");
    Eigen::MatrixXcd rho = Eigen::Map<const Eigen::MatrixXcd>(sol.data(), dim, dim);
    rho = 0.5 * (rho + rho.adjoint()).eval();  // scrub factorization noise
    return rho;
  }

  // Too large for the dense Liouvillian: relax toward stationarity.
  Eigen::MatrixXcd rho = ground_density(ops.n);
  double t = 0.0, span = 5.0;
  while (t < options.steady_horizon) {
    integrate_adaptive(ops, rho, t, t + span, options.rtol, options.atol);
    t += span;
    span *= 2.0;
    if (rhs(ops, rho).cwiseAbs().maxCoeff() < options.steady_tolerance) return rho;
  }
  throw ConvergenceError("steady state not reached within the configured horizon");
}

Eigen::VectorXcd sigma_expectations(const Eigen::MatrixXcd& rho, int n_atoms) {
  const int dim = 1 << n_atoms;
  if (rho.rows() != dim) throw std::invalid_argument("density matrix dimension mismatch");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n_atoms);
  for (int mu = 0; mu < n_atoms; ++mu) {
    const int bit = 1 << mu;
    Complex acc = 0.0;
    for (int s = 0; s < dim; ++s)
      if (s & bit) acc += rho(s, s ^ bit);
    out[mu] = acc;
  }
  return out;
}

Eigen::VectorXd excited_populations(const Eigen::MatrixXcd& rho, int n_atoms) {
  const int dim = 1 << n_atoms;
  if (rho.rows() != dim) throw std::invalid_argument("density matrix dimension mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_atoms);
  for (int mu = 0; mu < n_atoms; ++mu) {
    const int bit = 1 << mu;
    double acc = 0.0;
    for (int s = 0; s < dim; ++s)
      if (s & bit) acc += rho(s, s).real();
    out[mu] = acc;
  }
  return out;
}

double g2_zero(const Eigen::MatrixXcd& rho, const Eigen::VectorXcd& weights) {
  const int n = static_cast<int>(weights.size());
  check_capacity(n);
  if (weights.norm() < 1e-15)
    throw std::invalid_argument("detection weights must not all vanish");
  const int dim = 1 << n;
  if (rho.rows() != dim) throw std::invalid_argument("density matrix dimension mismatch");

  SparseC dsp(dim, dim);
  for (int mu = 0; mu < n; ++mu)
    if (std::abs(weights[mu]) > 0) dsp += SparseC(weights[mu] * lowering_operator(n, mu));
  const Eigen::MatrixXcd d = dsp.toDense();
  const Eigen::MatrixXcd d2 = d * d;
  const double n1 = (d.adjoint() * d * rho).trace().real();
  const double n2 = (d2 * rho * d2.adjoint()).trace().real();
  if (n1 * n1 < 1e-14) return std::numeric_limits<double>::infinity();
  return n2 / (n1 * n1);
}

}  // namespace pmddi
