#include "pmddi/bands.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pmddi {

std::array<Vec2, 2> LatticeSpec2D::bravais() const {
  switch (kind) {
    case LatticeKind::square:
      return {Vec2(a, 0), Vec2(0, a)};
    case LatticeKind::rectangular:
      return {Vec2(a, 0), Vec2(0, eta * a)};
    case LatticeKind::honeycomb: {
      const double a0 = std::sqrt(3.0) * a;  // lattice constant
      return {Vec2(a0, 0), Vec2(0.5 * a0, 0.5 * std::sqrt(3.0) * a0)};
    }
  }
  throw std::invalid_argument("unknown lattice kind");
}

std::array<Vec2, 2> LatticeSpec2D::reciprocal() const {
  const auto [a1, a2] = bravais();
  const double area = a1.x() * a2.y() - a1.y() * a2.x();
  return {kTwoPi / area * Vec2(a2.y(), -a2.x()),
          kTwoPi / area * Vec2(-a1.y(), a1.x())};
}

std::vector<Vec2> LatticeSpec2D::basis() const {
  if (kind != LatticeKind::honeycomb) return {Vec2(0, 0)};
  const double a0 = std::sqrt(3.0) * a;
  return {Vec2(0, 0), Vec2(0.5 * a0, 0.5 * a0 / std::sqrt(3.0))};
}

void LatticeSpec2D::validate(double r_cut) const {
  if (a <= 0) throw std::invalid_argument("lattice spacing must be > 0");
  if (eta <= 0) throw std::invalid_argument("aspect ratio must be > 0");
  if (gamma_total <= 0) throw std::invalid_argument("decay rate must be > 0");
  if (r_cut < 10.0 * a - 1e-12 * a)
    throw std::invalid_argument(
        "truncation radius below 10 lattice spacings; the sum would not be "
        "converged");
}

Vec2 reduced_k(const LatticeSpec2D& spec, const Vec2& k) {
  const auto [a1, a2] = spec.bravais();
  Vec2 f(k.dot(a1) / kTwoPi, k.dot(a2) / kTwoPi);
  f.x() -= std::floor(f.x());
  f.y() -= std::floor(f.y());
  return f;
}

namespace {

// Free-space kernel between in-plane sites in the circular basis (e+, e-),
// coupling-matrix convention (project on a polarization to get
// gamma/2 + i*Omega).
Eigen::Matrix2cd circular_block(const Vec2& r, double gamma_total) {
  const double xi = r.norm();
  const double s = std::sin(xi), c = std::cos(xi);
  const Complex far(s / xi, -c / xi);
  const double xi2 = xi * xi, xi3 = xi2 * xi;
  const Complex near(c / xi2 - s / xi3, s / xi2 + c / xi3);
  const Complex e2 = std::polar(1.0, 2.0 * std::atan2(r.y(), r.x()));
  Eigen::Matrix2cd p1, p3;
  p1 << 0.5, 0.5 * std::conj(e2), 0.5 * e2, 0.5;
  p3 << -0.5, 1.5 * std::conj(e2), 1.5 * e2, -0.5;
  return 0.75 * gamma_total * (far * p1 + near * p3);
}

// Same kernel in the Bloch-matrix convention used by this module, whose
// eigenvalues read shift - i*decay/2.
Eigen::MatrixXcd bloch_block(const LatticeSpec2D& spec, const Vec2& r) {
  const Eigen::Matrix2cd full =
      -kI * circular_block(r, spec.gamma_total).conjugate();
  switch (spec.levels) {
    case LevelScheme::v_type:
      return full;
    case LevelScheme::sigma_plus:
      return full.block<1, 1>(0, 0);
    case LevelScheme::sigma_minus:
      return full.block<1, 1>(1, 1);
  }
  throw std::invalid_argument("unknown level scheme");
}

struct BlochBuilder {
  LatticeSpec2D spec;
  double r_cut;
  int n_sub, n_lvl, dim;
  struct Term {
    int n1, n2;
    double radius;
    Eigen::MatrixXcd block;
  };
  std::vector<std::vector<Term>> terms;  // indexed s * n_sub + s'

  BlochBuilder(const LatticeSpec2D& sp, double rc) : spec(sp), r_cut(rc) {
    spec.validate(r_cut);
    const auto [a1, a2] = spec.bravais();
    const auto offsets = spec.basis();
    n_sub = static_cast<int>(offsets.size());
    n_lvl = spec.internal_levels();
    dim = n_sub * n_lvl;
    const double area = std::abs(a1.x() * a2.y() - a1.y() * a2.x());
    const double keep = r_cut * (1.0 + 1e-12);  // stabilize shell-edge ties
    terms.resize(n_sub * n_sub);
    for (int s = 0; s < n_sub; ++s)
      for (int sp2 = 0; sp2 < n_sub; ++sp2) {
        const Vec2 d = offsets[s] - offsets[sp2];
        const int m1 =
            static_cast<int>(std::ceil((keep + d.norm()) * a2.norm() / area)) + 1;
        const int m2 =
            static_cast<int>(std::ceil((keep + d.norm()) * a1.norm() / area)) + 1;
        auto& list = terms[s * n_sub + sp2];
        for (int n1 = -m1; n1 <= m1; ++n1)
          for (int n2 = -m2; n2 <= m2; ++n2) {
            const Vec2 r = n1 * a1 + n2 * a2 + d;
            const double radius = r.norm();
            if (radius > keep || radius < 1e-12 * spec.a) continue;
            list.push_back({n1, n2, radius, bloch_block(spec, r)});
          }
      }
  }

  // f in reduced coordinates; terms beyond radius_limit are skipped (used by
  // the tail estimate).
  Eigen::MatrixXcd assemble(const Vec2& f, double radius_limit) const {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    for (int s = 0; s < n_sub; ++s)
      for (int sp2 = 0; sp2 < n_sub; ++sp2) {
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n_lvl, n_lvl);
        for (const Term& t : terms[s * n_sub + sp2]) {
          if (t.radius > radius_limit) continue;
          const double ang = kTwoPi * (f.x() * t.n1 + f.y() * t.n2);
          acc += std::polar(1.0, ang) * t.block;
        }
        h.block(s * n_lvl, sp2 * n_lvl, n_lvl, n_lvl) = acc;
      }
    for (int s = 0; s < n_sub; ++s)
      for (int l = 0; l < n_lvl; ++l) {
        double dz = 0.0;
        if (spec.levels == LevelScheme::v_type)
          dz = (l == 0 ? spec.zeeman : -spec.zeeman);
        else
          dz = (spec.levels == LevelScheme::sigma_plus ? spec.zeeman
                                                       : -spec.zeeman);
        h(s * n_lvl + l, s * n_lvl + l) +=
            Complex(dz, -0.5 * spec.gamma_total);
      }
    return h;
  }

  double tail_estimate(const Vec2& f) const {
    const Eigen::MatrixXcd s0 = assemble(f, r_cut);
    const double step = std::min(0.5 * kPi, r_cut / 8.0);
    double worst = 0.0;
    for (int j = 1; j <= 4; ++j) {
      const Eigen::MatrixXcd sj = assemble(f, r_cut - j * step);
      worst = std::max(worst, (s0 - sj).norm());
    }
    return 3.0 * worst;  // partial sums oscillate about the limit
  }
};

Vec2 cartesian_from_reduced(const LatticeSpec2D& spec, const Vec2& f) {
  const auto [b1, b2] = spec.reciprocal();
  return f.x() * b1 + f.y() * b2;
}

void sorted_eigensystem(const Eigen::MatrixXcd& h, Eigen::VectorXcd& vals,
                        Eigen::MatrixXcd& vecs) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success)
    throw NumericalError("Bloch eigendecomposition failed");
  const int n = static_cast<int>(h.rows());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXcd raw = es.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    if (raw[i].real() != raw[j].real()) return raw[i].real() < raw[j].real();
    return raw[i].imag() < raw[j].imag();
  });
  vals.resize(n);
  vecs.resize(n, n);
  for (int i = 0; i < n; ++i) {
    vals[i] = raw[order[i]];
    vecs.col(i) = es.eigenvectors().col(order[i]);
  }
}

}  // namespace

Eigen::MatrixXcd bloch_hamiltonian(const LatticeSpec2D& spec, const Vec2& k,
                                   double r_cut) {
  const BlochBuilder builder(spec, r_cut);
  return builder.assemble(reduced_k(spec, k), r_cut);
}

double bloch_tail_estimate(const LatticeSpec2D& spec, const Vec2& k,
                           double r_cut) {
  const BlochBuilder builder(spec, r_cut);
  return builder.tail_estimate(reduced_k(spec, k));
}

HighSymmetryPoints high_symmetry_points(const LatticeSpec2D& spec) {
  const auto [b1, b2] = spec.reciprocal();
  HighSymmetryPoints p;
  p.gamma = Vec2(0, 0);
  if (spec.kind == LatticeKind::honeycomb) {
    p.k = (2.0 * b1 + b2) / 3.0;
    p.k_prime = (b1 + 2.0 * b2) / 3.0;
    p.m = 0.5 * (b1 + b2);
  } else {
    p.k = 0.5 * b1;          // edge midpoint (X)
    p.k_prime = 0.5 * b2;
    p.m = 0.5 * (b1 + b2);   // corner
  }
  return p;
}

std::vector<Vec2> high_symmetry_path(const LatticeSpec2D& spec,
                                     int per_segment) {
  if (per_segment < 1) throw std::invalid_argument("need >= 1 step per leg");
  const HighSymmetryPoints p = high_symmetry_points(spec);
  const Vec2 corners[4] = {p.gamma, p.k, p.m, p.gamma};
  std::vector<Vec2> path;
  path.push_back(corners[0]);
  for (int leg = 0; leg < 3; ++leg)
    for (int i = 1; i <= per_segment; ++i) {
      const double t = static_cast<double>(i) / per_segment;
      path.push_back(corners[leg] + t * (corners[leg + 1] - corners[leg]));
    }
  return path;
}

BandSet band_structure(const LatticeSpec2D& spec,
                       const std::vector<Vec2>& k_path, double r_cut) {
  if (k_path.empty()) throw std::invalid_argument("empty k path");
  const BlochBuilder builder(spec, r_cut);
  const int nk = static_cast<int>(k_path.size());
  const int nb = builder.dim;

  BandSet out;
  out.k_path = k_path;
  out.eigenvalues.resize(nk, nb);
  out.shifts.resize(nk, nb);
  out.decays.resize(nk, nb);
  out.modes.resize(nk);
  out.in_light_cone.resize(nk);
  for (int i = 0; i < nk; ++i) {
    const Eigen::MatrixXcd h =
        builder.assemble(reduced_k(spec, k_path[i]), r_cut);
    Eigen::VectorXcd vals;
    Eigen::MatrixXcd vecs;
    sorted_eigensystem(h, vals, vecs);
    out.eigenvalues.row(i) = vals.transpose();
    out.shifts.row(i) = vals.real().transpose();
    out.decays.row(i) = -2.0 * vals.imag().transpose();
    out.modes[i] = vecs;
    out.in_light_cone[i] = in_light_cone(k_path[i]);
  }

  const HighSymmetryPoints p = high_symmetry_points(spec);
  for (const Vec2& probe : {p.gamma, p.k, p.m})
    out.tail_bound =
        std::max(out.tail_bound, builder.tail_estimate(reduced_k(spec, probe)));
  out.tail_warning = out.tail_bound > 0.2 * spec.gamma_total;
  return out;
}

ChernSpectrum chern_numbers(const LatticeSpec2D& spec, int grid, double r_cut,
                            double gap_threshold) {
  if (grid < 3) throw std::invalid_argument("Chern grid must be >= 3");
  if (gap_threshold <= 0) throw std::invalid_argument("gap threshold must be > 0");
  const BlochBuilder builder(spec, r_cut);
  const int nb = builder.dim;
  const int m = grid;

  std::vector<Eigen::MatrixXcd> vecs(m * m);
  std::vector<Eigen::VectorXd> vals(m * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const Vec2 f(static_cast<double>(i) / m, static_cast<double>(j) / m);
      const Eigen::MatrixXcd h = builder.assemble(f, r_cut);
      const Eigen::MatrixXcd herm = 0.5 * (h + h.adjoint());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
      if (es.info() != Eigen::Success)
        throw NumericalError("Hermitian-part eigendecomposition failed");
      vecs[i * m + j] = es.eigenvectors();
      vals[i * m + j] = es.eigenvalues();
    }

  // Adjacent-band gaps over the grid plus high-symmetry probes, on the
  // Hermitian spectrum that defines the topology.
  Eigen::VectorXd min_gap = Eigen::VectorXd::Constant(
      std::max(nb - 1, 1), std::numeric_limits<double>::infinity());
  std::vector<Vec2> argmin(std::max(nb - 1, 1), Vec2(0, 0));
  auto feed = [&](const Eigen::VectorXd& e, const Vec2& f) {
    for (int b = 0; b + 1 < nb; ++b) {
      const double g = e[b + 1] - e[b];
      if (g < min_gap[b]) {
        min_gap[b] = g;
        argmin[b] = f;
      }
    }
  };
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      feed(vals[i * m + j],
           Vec2(static_cast<double>(i) / m, static_cast<double>(j) / m));
  const Vec2 extra[] = {{0.5, 0.0},          {0.0, 0.5},
                        {0.5, 0.5},          {2.0 / 3.0, 1.0 / 3.0},
                        {1.0 / 3.0, 2.0 / 3.0}};
  for (const Vec2& f : extra) {
    const Eigen::MatrixXcd h = builder.assemble(f, r_cut);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        0.5 * (h + h.adjoint()));
    feed(es.eigenvalues(), f);
  }

  ChernSpectrum out;
  out.grid = m;
  int start = 0;
  out.min_intergroup_gap = std::numeric_limits<double>::infinity();
  for (int b = 0; b + 1 < nb; ++b)
    if (min_gap[b] > gap_threshold) {
      out.groups.emplace_back(start, b);
      out.min_intergroup_gap = std::min(out.min_intergroup_gap, min_gap[b]);
      start = b + 1;
    }
  out.groups.emplace_back(start, nb - 1);
  if (nb > 1 && out.groups.size() == 1) {
    int worst = 0;
    min_gap.minCoeff(&worst);
    std::ostringstream msg;
    msg << "no spectral gap separates the bands (smallest adjacent gap "
        << min_gap[worst] << "); topology is undefined";
    throw GaplessBandError(msg.str(),
                           cartesian_from_reduced(spec, argmin[worst]),
                           min_gap[worst]);
  }
  if (out.groups.size() == 1) out.min_intergroup_gap = 0.0;

  for (const auto& [p, q] : out.groups) {
    const int w = q - p + 1;
    // Link variables between neighbouring grid points, periodic wrap.
    Eigen::MatrixXcd ux(m, m), uy(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const auto& here = vecs[i * m + j];
        const auto& right = vecs[((i + 1) % m) * m + j];
        const auto& up = vecs[i * m + (j + 1) % m];
        const Complex dx = (here.middleCols(p, w).adjoint() *
                            right.middleCols(p, w)).determinant();
        const Complex dy = (here.middleCols(p, w).adjoint() *
                            up.middleCols(p, w)).determinant();
        if (std::abs(dx) < 1e-12 || std::abs(dy) < 1e-12)
          throw NumericalError(
              "Berry link nearly singular; refine the Chern grid");
        ux(i, j) = dx;
        uy(i, j) = dy;
      }
    double flux = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        flux += std::arg(ux(i, j) * uy((i + 1) % m, j) *
                         std::conj(ux(i, (j + 1) % m)) * std::conj(uy(i, j)));
    const double c = flux / kTwoPi;
    out.chern.push_back(static_cast<int>(std::lround(c)));
    out.residuals.push_back(std::abs(c - std::lround(c)));
  }
  return out;
}

int chern_number(const LatticeSpec2D& spec, int band_index, int grid,
                 double r_cut, double gap_threshold) {
  const ChernSpectrum s = chern_numbers(spec, grid, r_cut, gap_threshold);
  for (std::size_t g = 0; g < s.groups.size(); ++g)
    if (band_index >= s.groups[g].first && band_index <= s.groups[g].second)
      return s.chern[g];
  throw std::invalid_argument("band index out of range");
}

RibbonSpectrum ribbon_spectrum(const LatticeSpec2D& spec, int width,
                               double k_par, double r_cut) {
  spec.validate(r_cut);
  if (spec.kind == LatticeKind::honeycomb)
    throw UnsupportedConfigError(
        "ribbon cuts are defined for square/rectangular lattices");
  if (spec.levels == LevelScheme::v_type)
    throw UnsupportedConfigError(
        "ribbon solver handles a single level (sigma+ or sigma-)");
  if (width < 4) throw std::invalid_argument("ribbon width must be >= 4 cells");
  if (width > 4000)
    throw CapacityError("ribbon matrix exceeds the dense eigensolver budget");

  const auto [a1, a2] = spec.bravais();
  const Vec2 u = a1 + a2;  // periodic [11] direction
  const Vec2 v = a1 - a2;  // transverse direction
  const double cell_len = u.norm();
  const double dz =
      spec.levels == LevelScheme::sigma_plus ? spec.zeeman : -spec.zeeman;

  // Kernel column sums per transverse separation; the two sites of the
  // doubled cell sit at 0 and a1 = (u + v)/2. The y component of a
  // separation is eta*a*(c - dl), which pins the admissible cell range.
  const int c_span =
      static_cast<int>(std::ceil(r_cut / (spec.eta * spec.a))) + 1;
  const int nl = 2 * width - 1;
  Eigen::MatrixXcd h_sum(nl, 3);  // columns: dsigma = -1, 0, +1
  for (int dl = -(width - 1); dl <= width - 1; ++dl)
    for (int ds = -1; ds <= 1; ++ds) {
      Complex acc = 0;
      for (int c = dl - c_span; c <= dl + c_span; ++c) {
        const Vec2 r = static_cast<double>(c) * u +
                       static_cast<double>(dl) * v +
                       static_cast<double>(ds) * a1;
        const double radius = r.norm();
        if (radius > r_cut || radius < 1e-12 * spec.a) continue;
        acc += std::polar(1.0, k_par * cell_len * c) * bloch_block(spec, r)(0, 0);
      }
      h_sum(dl + width - 1, ds + 1) = acc;
    }

  const int n = 2 * width;
  Eigen::MatrixXcd h(n, n);
  for (int l = 0; l < width; ++l)
    for (int s = 0; s < 2; ++s)
      for (int lp = 0; lp < width; ++lp)
        for (int sp2 = 0; sp2 < 2; ++sp2) {
          Complex val = h_sum(l - lp + width - 1, s - sp2 + 1);
          if (l == lp && s == sp2) val += Complex(dz, -0.5 * spec.gamma_total);
          h(2 * l + s, 2 * lp + sp2) = val;
        }

  RibbonSpectrum out;
  out.k_par = k_par;
  out.width = width;
  sorted_eigensystem(h, out.eigenvalues, out.modes);

  out.com.resize(n);
  out.ipr.resize(n);
  for (int mde = 0; mde < n; ++mde) {
    const Eigen::VectorXd p = out.modes.col(mde).cwiseAbs2();
    const double total = p.sum();
    double com = 0;
    for (int l = 0; l < width; ++l)
      for (int s = 0; s < 2; ++s) com += (l + 0.5 * s) * p[2 * l + s];
    out.com[mde] = com / total / (width - 0.5);
    out.ipr[mde] = p.squaredNorm() / (total * total);
  }
  return out;
}

}  // namespace pmddi
