#pragma once

// Pairwise photon-mediated couplings. Two media are supported: the 3D
// free-space dipole kernel and a single-mode 1D waveguide (optionally
// chiral). Both produce the same CouplingMatrix type consumed by the
// dynamics layer.

#include "pmddi/geometry.hpp"
#include "pmddi/types.hpp"

namespace pmddi {

struct CouplingMatrix {
  // J(mu,nu) = gamma_{mu,nu}/2 + i*Omega_{mu,nu}; diagonal = total_rate/2.
  Eigen::MatrixXcd J;
  double total_rate = 1.0;  // single-atom decay rate on the diagonal
  bool reciprocal = true;
  // Set when the free-space kernel was evaluated below xi = 0.5 where the
  // two-level point-dipole description starts to lose validity.
  bool near_field_warning = false;
  double min_xi = std::numeric_limits<double>::infinity();

  int n() const { return static_cast<int>(J.rows()); }
  Eigen::MatrixXd gamma() const { return 2.0 * J.real(); }
  Eigen::MatrixXd omega() const {
    Eigen::MatrixXd o = J.imag();
    o.diagonal().setZero();
    return o;
  }
};

template <class S>
struct FreeSpacePair {
  S gamma;
  S omega;
};

// Scalar free-space kernel at dimensionless separation xi = k_L * r for a
// linear dipole with projection p_dot_r = p_hat . r_hat:
//   gamma = (3G/2) [ (1-c^2) sin(xi)/xi + (1-3c^2)(cos(xi)/xi^2 - sin(xi)/xi^3) ]
//   Omega = (3G/4) [ -(1-c^2) cos(xi)/xi + (1-3c^2)(sin(xi)/xi^2 + cos(xi)/xi^3) ]
template <class S>
FreeSpacePair<S> free_space_pair(S xi, S p_dot_r, S gamma_total = S(1)) {
  if (!(xi > S(1e-12))) throw DivergenceError("free-space kernel at zero separation");
  const S c2 = p_dot_r * p_dot_r;
  const S s = std::sin(xi), c = std::cos(xi);
  const S t1 = s / xi;
  const S t2 = c / (xi * xi) - s / (xi * xi * xi);
  const S t3 = s / (xi * xi) + c / (xi * xi * xi);
  FreeSpacePair<S> out;
  out.gamma = S(1.5) * gamma_total * ((S(1) - c2) * t1 + (S(1) - S(3) * c2) * t2);
  out.omega = S(0.75) * gamma_total * (-(S(1) - c2) * c / xi + (S(1) - S(3) * c2) * t3);
  return out;
}

// Full dyadic kernel K(r), normalized so that for any unit polarization p
// (complex allowed), p^dag K p = gamma/2 + i*Omega of that polarization:
//   K = (3G/4) [ (I - rr)(sin/xi - i cos/xi)
//              + (I - 3rr)((cos/xi^2 - sin/xi^3) + i(sin/xi^2 + cos/xi^3)) ]
template <class S>
Eigen::Matrix<std::complex<S>, 3, 3> free_space_tensor_kernel(
    const Eigen::Matrix<S, 3, 1>& r, S gamma_total = S(1)) {
  using C = std::complex<S>;
  const S xi = r.norm();
  if (!(xi > S(1e-12))) throw DivergenceError("free-space kernel at zero separation");
  const Eigen::Matrix<S, 3, 1> rh = r / xi;
  const Eigen::Matrix<S, 3, 3> rr = rh * rh.transpose();
  const Eigen::Matrix<S, 3, 3> id = Eigen::Matrix<S, 3, 3>::Identity();
  const S s = std::sin(xi), c = std::cos(xi);
  const C far(s / xi, -c / xi);
  const C near(c / (xi * xi) - s / (xi * xi * xi),
               s / (xi * xi) + c / (xi * xi * xi));
  Eigen::Matrix<C, 3, 3> out =
      (S(0.75) * gamma_total) *
      ((id - rr).template cast<C>() * far + (id - S(3) * rr).template cast<C>() * near);
  return out;
}

// Complex unit polarization vector for the given spec (sigma_pm are the
// in-plane circular combinations; v_type has no single vector).
Eigen::Vector3cd polarization_vector(const PolarizationSpec& pol);

// Free-space coupling matrix for identical two-level emitters with a common
// transition polarization.
CouplingMatrix free_space_coupling(const AtomEnsemble& ensemble,
                                   const PolarizationSpec& pol,
                                   double gamma_total = 1.0);

// 1D waveguide parameters. d_factor is the directionality
// D = (gamma_R - gamma_L) / (gamma_R + gamma_L); gamma_ng is nonradiative /
// non-guided loss added to the diagonal only.
struct ChiralSpec {
  double gamma_1d = 1.0;
  double d_factor = 0.0;
  double gamma_ng = 0.0;

  double gamma_right() const { return 0.5 * gamma_1d * (1.0 + d_factor); }
  double gamma_left() const { return 0.5 * gamma_1d * (1.0 - d_factor); }
  double total_rate() const { return gamma_1d + gamma_ng; }
};

// Guided coupling for a collinear chain:
//   J(mu,nu) = gamma_R e^{+i x_mu_nu}  (x_mu > x_nu)
//              gamma_L e^{-i x_mu_nu}  (x_mu < x_nu)
// with x in 1/k_L units. At D = 0 this reduces to
// (Gamma_1D/2)[cos(x) + i sin|x|]. The chain axis is the principal axis of
// the positions, oriented so its first nonzero Cartesian component is
// positive.
CouplingMatrix waveguide_coupling(const AtomEnsemble& ensemble,
                                  const ChiralSpec& spec = {});

// Signed coordinates of a collinear ensemble along the waveguide axis
// (relative to atom 0). Throws std::invalid_argument when not collinear.
Eigen::VectorXd waveguide_coordinates(const AtomEnsemble& ensemble);

}  // namespace pmddi
