#include "pmddi/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pmddi {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const Eigen::MatrixXd& rows) {
  if (rows.size() > 0 && static_cast<int>(header.size()) != rows.cols())
    throw std::invalid_argument("csv header/column mismatch");
  std::ofstream out = open_out(path);
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c)
      out << (c ? "," : "") << format_double(rows(r, c));
    out << "\n";
  }
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty csv " + path.string());
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  std::vector<double> data;
  Eigen::Index nrows = 0;
  const auto ncols = static_cast<Eigen::Index>(table.header.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Eigen::Index c = 0;
    while (std::getline(ss, cell, ',')) {
      data.push_back(std::strtod(cell.c_str(), nullptr));
      ++c;
    }
    if (c != ncols)
      throw std::runtime_error("ragged csv row in " + path.string());
    ++nrows;
  }
  table.rows.resize(nrows, ncols);
  for (Eigen::Index r = 0; r < nrows; ++r)
    for (Eigen::Index c = 0; c < ncols; ++c)
      table.rows(r, c) = data[r * ncols + c];
  return table;
}

void write_ensemble_csv(const std::filesystem::path& path,
                        const AtomEnsemble& ensemble) {
  Eigen::MatrixXd rows(ensemble.n(), 4);
  for (int i = 0; i < ensemble.n(); ++i) {
    rows(i, 0) = i;
    rows.row(i).segment(1, 3) = ensemble.positions.col(i).transpose();
  }
  write_csv(path, {"idx", "x", "y", "z"}, rows);
  nlohmann::json meta{{"label", ensemble.label}, {"n", ensemble.n()}};
  std::filesystem::path side = path;
  side += ".json";
  open_out(side) << meta.dump(2) << "\n";
}

AtomEnsemble read_ensemble_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const int ix = t.column("x"), iy = t.column("y"), iz = t.column("z");
  if (ix < 0 || iy < 0 || iz < 0)
    throw std::runtime_error("ensemble csv missing x/y/z columns");
  Eigen::Matrix3Xd pos(3, t.rows.rows());
  for (Eigen::Index i = 0; i < t.rows.rows(); ++i)
    pos.col(i) = Vec3(t.rows(i, ix), t.rows(i, iy), t.rows(i, iz));
  std::string label = path.stem().string();
  std::filesystem::path side = path;
  side += ".json";
  if (std::filesystem::exists(side)) {
    nlohmann::json meta = nlohmann::json::parse(open_in(side));
    label = meta.value("label", label);
  }
  return make_ensemble(pos, label);
}

void write_coupling_csv(const std::filesystem::path& path,
                        const CouplingMatrix& coupling) {
  const int n = coupling.n();
  Eigen::MatrixXd rows(n, 2 * n);
  std::vector<std::string> header;
  for (int j = 0; j < n; ++j) {
    header.push_back("re_" + std::to_string(j));
    header.push_back("im_" + std::to_string(j));
    for (int i = 0; i < n; ++i) {
      rows(i, 2 * j) = coupling.J(i, j).real();
      rows(i, 2 * j + 1) = coupling.J(i, j).imag();
    }
  }
  write_csv(path, header, rows);
}

void write_eigenmodes_csv(const std::filesystem::path& path,
                          const EigenmodeSet& modes) {
  const auto n = modes.rates.size();
  Eigen::MatrixXd rows(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    rows(i, 0) = i;
    rows(i, 1) = modes.rates[i];
    rows(i, 2) = modes.shifts[i];
  }
  write_csv(path, {"mode", "rate", "shift"}, rows);
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& trajectory) {
  const auto nt = trajectory.times.size();
  const auto n = trajectory.b.cols();
  Eigen::MatrixXd rows(nt, 1 + 2 * n);
  std::vector<std::string> header{"time"};
  for (Eigen::Index j = 0; j < n; ++j) {
    header.push_back("re_" + std::to_string(j));
    header.push_back("im_" + std::to_string(j));
  }
  for (Eigen::Index t = 0; t < nt; ++t) {
    rows(t, 0) = trajectory.times[t];
    for (Eigen::Index j = 0; j < n; ++j) {
      rows(t, 1 + 2 * j) = trajectory.b(t, j).real();
      rows(t, 2 + 2 * j) = trajectory.b(t, j).imag();
    }
  }
  write_csv(path, header, rows);
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  if (t.header.empty() || t.header[0] != "time" || t.header.size() % 2 == 0)
    throw std::runtime_error("not a trajectory csv: " + path.string());
  const auto n = static_cast<Eigen::Index>((t.header.size() - 1) / 2);
  Trajectory traj;
  traj.times = t.rows.col(0);
  traj.b.resize(t.rows.rows(), n);
  for (Eigen::Index r = 0; r < t.rows.rows(); ++r)
    for (Eigen::Index j = 0; j < n; ++j)
      traj.b(r, j) = Complex(t.rows(r, 1 + 2 * j), t.rows(r, 2 + 2 * j));
  return traj;
}

void write_spectrum_csv(const std::filesystem::path& path,
                        const SpectrumScan& scan) {
  const auto n = scan.detunings.size();
  Eigen::MatrixXd rows(n, 5);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex t = scan.t[i];
    rows(i, 0) = scan.detunings[i];
    rows(i, 1) = t.real();
    rows(i, 2) = t.imag();
    rows(i, 3) = std::norm(t);
    rows(i, 4) = optical_depth(t);
  }
  write_csv(path, {"detuning", "re_t", "im_t", "abs_t2", "od"}, rows);
}

void write_lorentzian_fit_json(const std::filesystem::path& path,
                               const LorentzianFit& fit) {
  nlohmann::json j{{"center", fit.center},     {"fwhm", fit.fwhm},
                   {"depth", fit.depth},       {"offset", fit.offset},
                   {"converged", fit.converged}, {"iterations", fit.iterations},
                   {"rss", fit.rss}};
  open_out(path) << j.dump(2) << "\n";
}

void write_mirror_csv(const std::filesystem::path& path,
                      const MirrorScan& scan) {
  Eigen::MatrixXd rows(scan.spacings_over_lambda.size(), 2);
  rows.col(0) = scan.spacings_over_lambda;
  rows.col(1) = scan.abs_t2;
  write_csv(path, {"spacing_over_lambda", "abs_t2"}, rows);
}

void write_phase_map_csv(const std::filesystem::path& path,
                         const std::vector<PhaseMapRow>& rowspec) {
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(rowspec.size()), 6);
  for (std::size_t i = 0; i < rowspec.size(); ++i) {
    const PhaseDiagnostics& d = rowspec[i].diagnostics;
    rows.row(static_cast<Eigen::Index>(i))
        << rowspec[i].d_factor, rowspec[i].xi_over_pi, d.fourier_peak,
        d.fourier_contrast, d.edge_fraction, d.singular ? 1.0 : 0.0;
  }
  write_csv(path,
            {"d", "xi_over_pi", "fourier_peak", "contrast", "edge_fraction",
             "singular_flag"},
            rows);
}

void write_quench_csv(const std::filesystem::path& path,
                      const QuenchResult& quench) {
  const auto nt = quench.times.size();
  const auto nz = quench.zone_population.cols();
  Eigen::MatrixXd rows(nt, nz + 3);
  std::vector<std::string> header{"time"};
  for (Eigen::Index z = 0; z < nz; ++z)
    header.push_back("zone" + std::to_string(z + 1));
  header.push_back("total");
  header.push_back("retention");
  for (Eigen::Index t = 0; t < nt; ++t) {
    rows(t, 0) = quench.times[t];
    rows.row(t).segment(1, nz) = quench.zone_population.row(t);
    rows(t, nz + 1) = quench.total[t];
    rows(t, nz + 2) = quench.retention[t];
  }
  write_csv(path, header, rows);
}

void write_bands_csv(const std::filesystem::path& path, const BandSet& bands) {
  const auto nk = static_cast<Eigen::Index>(bands.k_path.size());
  const auto nb = bands.eigenvalues.cols();
  Eigen::MatrixXd rows(nk * nb, 6);
  for (Eigen::Index i = 0; i < nk; ++i)
    for (Eigen::Index b = 0; b < nb; ++b) {
      rows.row(i * nb + b) << bands.k_path[i].x(), bands.k_path[i].y(),
          static_cast<double>(b), bands.shifts(i, b), bands.decays(i, b),
          bands.in_light_cone[i] ? 1.0 : 0.0;
    }
  write_csv(path, {"kx", "ky", "band", "shift", "decay", "in_light_cone"},
            rows);
}

void write_ribbon_csv(const std::filesystem::path& path,
                      const RibbonSpectrum& ribbon) {
  const auto n = ribbon.eigenvalues.size();
  Eigen::MatrixXd rows(n, 6);
  for (Eigen::Index i = 0; i < n; ++i) {
    rows.row(i) << ribbon.k_par, static_cast<double>(i),
        ribbon.eigenvalues[i].real(), ribbon.eigenvalues[i].imag(),
        ribbon.com[i], ribbon.ipr[i];
  }
  write_csv(path, {"k_par", "mode", "re", "im", "com", "ipr"}, rows);
}

void write_chern_json(const std::filesystem::path& path,
                      const ChernSpectrum& chern) {
  nlohmann::json groups = nlohmann::json::array();
  for (std::size_t g = 0; g < chern.groups.size(); ++g)
    groups.push_back({{"first_band", chern.groups[g].first},
                      {"last_band", chern.groups[g].second},
                      {"chern", chern.chern[g]},
                      {"residual", chern.residuals[g]}});
  nlohmann::json j{{"groups", groups},
                   {"grid", chern.grid},
                   {"min_intergroup_gap", chern.min_intergroup_gap}};
  open_out(path) << j.dump(2) << "\n";
}

void write_manifest(const std::filesystem::path& dir,
                    const std::string& resolved_config_json,
                    const std::string& version, double wall_seconds,
                    const std::vector<std::string>& warnings,
                    const std::vector<std::string>& outputs) {
  nlohmann::json j{{"config", nlohmann::json::parse(resolved_config_json)},
                   {"version", version},
                   {"wall_seconds", wall_seconds},
                   {"warnings", warnings},
                   {"outputs", outputs}};
  open_out(dir / "manifest.json") << j.dump(2) << "\n";
}

}  // namespace pmddi
