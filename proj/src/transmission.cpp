#include "pmddi/transmission.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "pmddi/geometry.hpp"

namespace pmddi {

Complex transmission_plane_wave(const AtomEnsemble& ensemble,
                                const Eigen::VectorXcd& b, double rabi,
                                double disk_radius, double gamma_total) {
  if (rabi == 0.0) throw std::invalid_argument("transmission needs a nonzero drive");
  if (disk_radius <= 0) throw std::invalid_argument("disk radius must be > 0");
  if (b.size() != ensemble.n())
    throw std::invalid_argument("amplitude vector does not match ensemble");
  Complex acc = 0;
  for (int i = 0; i < ensemble.n(); ++i)
    acc += b[i] * std::exp(-kI * ensemble.positions(2, i));
  return 1.0 + kI * (3.0 * gamma_total / (rabi * disk_radius * disk_radius)) * acc;
}

Complex gaussian_mode_transmission(const AtomEnsemble& ensemble,
                                   const Eigen::VectorXcd& b, double rabi,
                                   double waist, double gamma_total) {
  if (rabi == 0.0) throw std::invalid_argument("transmission needs a nonzero drive");
  if (waist <= 0) throw std::invalid_argument("waist must be > 0");
  if (b.size() != ensemble.n())
    throw std::invalid_argument("amplitude vector does not match ensemble");
  Complex acc = 0;
  for (int i = 0; i < ensemble.n(); ++i) {
    const Vec3 r = ensemble.positions.col(i);
    acc += std::conj(paraxial_mode(r, waist)) * b[i] * std::exp(-kI * r.z());
  }
  // Mode area pi w0^2 / 2 turns the plane-wave prefactor 3/R^2 into 6/w0^2.
  return 1.0 + kI * (6.0 * gamma_total / (rabi * waist * waist)) * acc;
}

double optical_depth(Complex t) {
  const double p = std::norm(t);
  if (p <= 0) throw NumericalError("optical depth undefined for |T| = 0");
  return -std::log(p);
}

namespace {

struct Model {
  // f(x) = offset - depth / (1 + 4 (x - center)^2 / fwhm^2)
  static double eval(double x, const Eigen::Vector4d& p) {
    const double u = 2.0 * (x - p[0]) / p[1];
    return p[3] - p[2] / (1.0 + u * u);
  }
  static Eigen::Vector4d grad(double x, const Eigen::Vector4d& p) {
    const double u = 2.0 * (x - p[0]) / p[1];
    const double l = 1.0 / (1.0 + u * u);
    Eigen::Vector4d g;
    g[0] = -4.0 * p[2] * u * l * l / p[1];  // d/d center
    g[1] = -2.0 * p[2] * u * u * l * l / p[1];  // d/d fwhm
    g[2] = -l;                                  // d/d depth
    g[3] = 1.0;                                 // d/d offset
    return g;
  }
};

double rss_of(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
              const Eigen::Vector4d& p) {
  double s = 0;
  for (int i = 0; i < x.size(); ++i) {
    const double r = y[i] - Model::eval(x[i], p);
    s += r * r;
  }
  return s;
}

}  // namespace

LorentzianFit fit_lorentzian_dip(const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw std::invalid_argument("x/y size mismatch");
  if (x.size() < 5)
    throw std::invalid_argument("lorentzian fit needs at least 5 samples");
  const int n = static_cast<int>(x.size());

  // Starting point: baseline from the max, dip at the min, width from the
  // half-depth crossings around the minimum.
  int im = 0;
  y.minCoeff(&im);
  const double offset0 = y.maxCoeff();
  const double depth0 = std::max(offset0 - y[im], 1e-12 * std::abs(offset0) + 1e-300);
  const double half = offset0 - 0.5 * depth0;
  double xl = x.minCoeff(), xr = x.maxCoeff();
  for (int i = im; i > 0; --i)
    if (y[i - 1] >= half) {
      const double f = (half - y[i]) / (y[i - 1] - y[i]);
      xl = x[i] + f * (x[i - 1] - x[i]);
      break;
    }
  for (int i = im; i < n - 1; ++i)
    if (y[i + 1] >= half) {
      const double f = (half - y[i]) / (y[i + 1] - y[i]);
      xr = x[i] + f * (x[i + 1] - x[i]);
      break;
    }
  double w0 = std::abs(xr - xl);
  if (w0 <= 0) w0 = 0.25 * (x.maxCoeff() - x.minCoeff());
  if (w0 <= 0) throw std::invalid_argument("degenerate abscissa grid");

  Eigen::Vector4d p(x[im], w0, depth0, offset0);
  double rss = rss_of(x, y, p);

  // Levenberg-Marquardt on the four parameters.
  LorentzianFit out;
  double lambda = 1e-3;
  int it = 0;
  for (; it < 200; ++it) {
    Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
    Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
    for (int i = 0; i < n; ++i) {
      const Eigen::Vector4d g = Model::grad(x[i], p);
      const double r = y[i] - Model::eval(x[i], p);
      jtj += g * g.transpose();
      jtr += g * r;
    }
    bool stepped = false;
    for (int attempt = 0; attempt < 25; ++attempt) {
      Eigen::Matrix4d a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-14);
      const Eigen::Vector4d step = a.ldlt().solve(jtr);
      Eigen::Vector4d cand = p + step;
      cand[1] = std::abs(cand[1]);  // model is even in fwhm
      if (cand[1] < 1e-300) cand[1] = p[1];
      const double cand_rss = rss_of(x, y, cand);
      if (std::isfinite(cand_rss) && cand_rss <= rss) {
        const double scale = p.cwiseAbs().maxCoeff() + 1e-30;
        const bool tiny = step.cwiseAbs().maxCoeff() < 1e-12 * scale;
        const bool flat = (rss - cand_rss) < 1e-15 * (rss + 1e-30);
        p = cand;
        rss = cand_rss;
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        if (tiny || flat) {
          out.converged = true;
        }
        break;
      }
      lambda *= 5.0;
    }
    if (!stepped || out.converged) break;
  }

  out.center = p[0];
  out.fwhm = p[1];
  out.depth = p[2];
  out.offset = p[3];
  out.iterations = it + 1;
  out.rss = rss;
  return out;
}

SpectrumScan spectrum_scan(const CouplingMatrix& coupling,
                           const AtomEnsemble& ensemble, double rabi,
                           const Eigen::VectorXd& detunings,
                           const ProbeGeometry& probe) {
  if (detunings.size() < 5)
    throw std::invalid_argument("spectrum scan needs at least 5 detunings");
  if (coupling.n() != ensemble.n())
    throw std::invalid_argument("coupling does not match ensemble");
  SpectrumScan scan;
  scan.detunings = detunings;
  scan.t.resize(detunings.size());
  for (int i = 0; i < detunings.size(); ++i) {
    DriveSpec drive =
        probe.kind == ProbeGeometry::Kind::plane
            ? plane_wave_drive(ensemble, rabi, detunings[i])
            : gaussian_beam_drive(ensemble, rabi, detunings[i], probe.size);
    const DipoleState ss = steady_state(coupling, drive);
    scan.t[i] = probe.kind == ProbeGeometry::Kind::plane
                    ? transmission_plane_wave(ensemble, ss.b, rabi, probe.size,
                                              coupling.total_rate)
                    : gaussian_mode_transmission(ensemble, ss.b, rabi,
                                                 probe.size,
                                                 coupling.total_rate);
  }
  scan.fit = fit_lorentzian_dip(scan.detunings, scan.t.cwiseAbs2());
  return scan;
}

MirrorScan mirror_scan(int m, const Eigen::VectorXd& spacings_over_lambda,
                       double waist_over_lambda, double gamma_total) {
  if (m < 1) throw std::invalid_argument("array side must be >= 1");
  if (spacings_over_lambda.size() < 1)
    throw std::invalid_argument("empty spacing grid");
  if ((spacings_over_lambda.array() <= 0).any())
    throw std::invalid_argument("spacings must be > 0");
  if (waist_over_lambda <= 0) throw std::invalid_argument("waist must be > 0");

  const double rabi = 1e-3;  // linear model: T is independent of the value
  const double w0 = waist_over_lambda * kTwoPi;
  const PolarizationSpec pol = PolarizationSpec::linear(Vec3::UnitX());

  MirrorScan scan;
  scan.spacings_over_lambda = spacings_over_lambda;
  scan.abs_t2.resize(spacings_over_lambda.size());
  for (int i = 0; i < spacings_over_lambda.size(); ++i) {
    const double a = spacings_over_lambda[i] * kTwoPi;
    const AtomEnsemble ens = make_square_lattice(m, m, a);
    const CouplingMatrix coupling = free_space_coupling(ens, pol, gamma_total);
    const DriveSpec drive = gaussian_beam_drive(ens, rabi, 0.0, w0);
    const DipoleState ss = steady_state(coupling, drive);
    scan.abs_t2[i] = std::norm(
        gaussian_mode_transmission(ens, ss.b, rabi, w0, gamma_total));
  }

  // Interior local minima, refined by the parabola through the three
  // bracketing samples (grid may be nonuniform).
  for (int i = 1; i + 1 < scan.abs_t2.size(); ++i) {
    const double y0 = scan.abs_t2[i - 1], y1 = scan.abs_t2[i],
                 y2 = scan.abs_t2[i + 1];
    if (!(y1 <= y0 && y1 <= y2 && (y1 < y0 || y1 < y2))) continue;
    const double x0 = scan.spacings_over_lambda[i - 1],
                 x1 = scan.spacings_over_lambda[i],
                 x2 = scan.spacings_over_lambda[i + 1];
    const double d01 = (y1 - y0) / (x1 - x0), d12 = (y2 - y1) / (x2 - x1);
    const double curv = 2.0 * (d12 - d01) / (x2 - x0);
    double loc = x1;
    if (curv > 0) {
      const double vertex = 0.5 * (x0 + x1) - d01 / curv;
      if (vertex > x0 && vertex < x2) loc = vertex;
    }
    scan.minima.push_back(loc);
  }
  return scan;
}

}  // namespace pmddi
