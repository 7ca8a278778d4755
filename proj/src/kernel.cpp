#include "pmddi/kernel.hpp"

#include <cmath>

namespace pmddi {

Eigen::Vector3cd polarization_vector(const PolarizationSpec& pol) {
  using Mode = PolarizationSpec::Mode;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  switch (pol.mode) {
    case Mode::linear:
      return pol.axis.cast<Complex>();
    case Mode::sigma_plus:  // -(x + iy)/sqrt(2)
      return Eigen::Vector3cd(-inv_sqrt2, Complex(0, -inv_sqrt2), 0);
    case Mode::sigma_minus:  // (x - iy)/sqrt(2)
      return Eigen::Vector3cd(inv_sqrt2, Complex(0, -inv_sqrt2), 0);
    default:
      throw UnsupportedConfigError("v_type has no single polarization vector");
  }
}

CouplingMatrix free_space_coupling(const AtomEnsemble& ensemble,
                                   const PolarizationSpec& pol,
                                   double gamma_total) {
  if (gamma_total <= 0) throw std::invalid_argument("gamma_total must be > 0");
  if (pol.mode == PolarizationSpec::Mode::v_type)
    throw UnsupportedConfigError(
        "free_space_coupling handles a single transition; use the lattice band "
        "module for V-type emitters");
  const int n = ensemble.n();
  CouplingMatrix out;
  out.J = Eigen::MatrixXcd::Zero(n, n);
  out.J.diagonal().setConstant(0.5 * gamma_total);
  out.total_rate = gamma_total;
  out.reciprocal = true;

  const bool linear = pol.mode == PolarizationSpec::Mode::linear;
  const Eigen::Vector3cd e = polarization_vector(pol);
  for (int nu = 0; nu < n; ++nu) {
    for (int mu = nu + 1; mu < n; ++mu) {
      const Vec3 r = ensemble.positions.col(mu) - ensemble.positions.col(nu);
      const double xi = r.norm();
      out.min_xi = std::min(out.min_xi, xi);
      Complex j;
      if (linear) {
        const auto pr = free_space_pair<double>(xi, pol.axis.dot(r) / xi, gamma_total);
        j = Complex(0.5 * pr.gamma, pr.omega);
      } else {
        j = e.adjoint() * free_space_tensor_kernel<double>(r, gamma_total) * e;
      }
      // K(-r) = K(r): one evaluation covers both orders.
      out.J(mu, nu) = j;
      out.J(nu, mu) = j;
    }
  }
  out.near_field_warning = out.min_xi < 0.5;
  return out;
}

Eigen::VectorXd waveguide_coordinates(const AtomEnsemble& ensemble) {
  const int n = ensemble.n();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (n < 2) return x;

  // Principal axis of the displacement set; collinearity means all residuals
  // orthogonal to it vanish.
  const Eigen::Matrix3Xd rel =
      ensemble.positions.colwise() - ensemble.positions.col(0);
  Eigen::JacobiSVD<Eigen::Matrix3Xd> svd(rel, Eigen::ComputeThinU);
  Vec3 axis = svd.matrixU().col(0);
  const double scale = rel.colwise().norm().maxCoeff();
  if (svd.singularValues().size() > 1 &&
      svd.singularValues()(1) > 1e-9 * std::max(1.0, scale))
    throw std::invalid_argument("waveguide coupling requires collinear atoms");

  // Deterministic orientation: first nonzero Cartesian component positive.
  for (int ax = 0; ax < 3; ++ax) {
    if (std::abs(axis[ax]) > 1e-12) {
      if (axis[ax] < 0) axis = -axis;
      break;
    }
  }
  x = rel.transpose() * axis;
  return x;
}

CouplingMatrix waveguide_coupling(const AtomEnsemble& ensemble,
                                  const ChiralSpec& spec) {
  if (spec.gamma_1d <= 0) throw std::invalid_argument("gamma_1d must be > 0");
  if (spec.gamma_ng < 0) throw std::invalid_argument("gamma_ng must be >= 0");
  if (spec.d_factor < -1.0 || spec.d_factor > 1.0)
    throw std::invalid_argument("directionality must lie in [-1, 1]");

  const Eigen::VectorXd x = waveguide_coordinates(ensemble);
  const int n = ensemble.n();
  const double gr = spec.gamma_right(), gl = spec.gamma_left();

  CouplingMatrix out;
  out.J = Eigen::MatrixXcd::Zero(n, n);
  out.J.diagonal().setConstant(0.5 * spec.total_rate());
  out.total_rate = spec.total_rate();
  out.reciprocal = spec.d_factor == 0.0;
  for (int nu = 0; nu < n; ++nu) {
    for (int mu = 0; mu < n; ++mu) {
      if (mu == nu) continue;
      const double d = x[mu] - x[nu];
      out.min_xi = std::min(out.min_xi, std::abs(d));
      out.J(mu, nu) = d > 0 ? gr * std::exp(kI * d) : gl * std::exp(-kI * d);
    }
  }
  return out;
}

}  // namespace pmddi
