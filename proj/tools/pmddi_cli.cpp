// Command-line front end: each workflow is a subcommand driven by a JSON
// config. Outputs are CSV/JSON files plus a manifest.json echoing the fully
// resolved config (defaults filled in). Exit codes: 0 success, 1 bad
// arguments or config, 2 numerical failure (with error.json diagnostic).

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pmddi/io.hpp"
#include "pmddi/lindblad.hpp"

namespace {

using nlohmann::json;
using namespace pmddi;

constexpr const char* kVersion = "0.1.0";

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) fail(where + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) fail("unknown key \"" + it.key() + "\" in " + where);
  }
}

// Typed getters that write applied defaults back into the config so the
// manifest records the resolved values.
double getd(json& o, const char* k, double def) {
  if (!o.contains(k)) o[k] = def;
  if (!o[k].is_number()) fail(std::string("key \"") + k + "\" must be a number");
  return o[k].get<double>();
}

double reqd(json& o, const char* k, const std::string& where) {
  if (!o.contains(k)) fail("missing key \"" + std::string(k) + "\" in " + where);
  if (!o[k].is_number()) fail(std::string("key \"") + k + "\" must be a number");
  return o[k].get<double>();
}

int geti(json& o, const char* k, int def) {
  if (!o.contains(k)) o[k] = def;
  if (!o[k].is_number_integer()) fail(std::string("key \"") + k + "\" must be an integer");
  return o[k].get<int>();
}

std::string gets(json& o, const char* k, const std::string& def) {
  if (!o.contains(k)) o[k] = def;
  if (!o[k].is_string()) fail(std::string("key \"") + k + "\" must be a string");
  return o[k].get<std::string>();
}

Vec3 get_vec3(json& o, const char* k, const Vec3& def) {
  if (!o.contains(k)) o[k] = {def.x(), def.y(), def.z()};
  const json& v = o[k];
  if (!v.is_array() || v.size() != 3) fail(std::string("key \"") + k + "\" must be [x,y,z]");
  return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
}

json& section(json& o, const char* k, bool required, const std::string& where) {
  if (!o.contains(k)) {
    if (required) fail("missing section \"" + std::string(k) + "\" in " + where);
    o[k] = json::object();
  }
  if (!o[k].is_object()) fail("section \"" + std::string(k) + "\" must be an object");
  return o[k];
}

Eigen::VectorXd linspace_section(json& o, const char* lo_key,
                                 const char* hi_key, const std::string& where) {
  check_keys(o, {lo_key, hi_key, "count"}, where);
  const double lo = reqd(o, lo_key, where);
  const double hi = reqd(o, hi_key, where);
  const int count = geti(o, "count", 101);
  if (count < 1) fail(where + ".count must be >= 1");
  if (count == 1) return Eigen::VectorXd::Constant(1, lo);
  return Eigen::VectorXd::LinSpaced(count, lo, hi);
}

AtomEnsemble build_geometry(json& g, std::uint64_t seed) {
  const std::string kind = gets(g, "kind", "");
  if (kind == "gaussian_cloud") {
    check_keys(g, {"kind", "n", "sigma"}, "geometry");
    return make_gaussian_cloud(geti(g, "n", 0),
                               get_vec3(g, "sigma", Vec3::Ones()), seed);
  }
  if (kind == "uniform_cylinder") {
    check_keys(g, {"kind", "n", "radius", "length"}, "geometry");
    return make_uniform_cylinder(geti(g, "n", 0), reqd(g, "radius", "geometry"),
                                 getd(g, "length", 0.0), seed);
  }
  if (kind == "square_lattice") {
    check_keys(g, {"kind", "m1", "m2", "a"}, "geometry");
    return make_square_lattice(geti(g, "m1", 0), geti(g, "m2", 0),
                               reqd(g, "a", "geometry"));
  }
  if (kind == "rectangular_lattice") {
    check_keys(g, {"kind", "m1", "m2", "a", "eta"}, "geometry");
    return make_rectangular_lattice(geti(g, "m1", 0), geti(g, "m2", 0),
                                    reqd(g, "a", "geometry"),
                                    getd(g, "eta", 1.0));
  }
  if (kind == "honeycomb_lattice") {
    check_keys(g, {"kind", "m1", "m2", "a"}, "geometry");
    return make_honeycomb_lattice(geti(g, "m1", 0), geti(g, "m2", 0),
                                  reqd(g, "a", "geometry"));
  }
  if (kind == "ring") {
    check_keys(g, {"kind", "n", "radius"}, "geometry");
    return make_ring(geti(g, "n", 0), reqd(g, "radius", "geometry"));
  }
  if (kind == "chain") {
    check_keys(g, {"kind", "n", "xi"}, "geometry");
    return make_chain(geti(g, "n", 0), reqd(g, "xi", "geometry"));
  }
  if (kind == "file") {
    check_keys(g, {"kind", "path"}, "geometry");
    return read_ensemble_csv(gets(g, "path", ""));
  }
  fail("geometry.kind must be one of gaussian_cloud, uniform_cylinder, "
       "square_lattice, rectangular_lattice, honeycomb_lattice, ring, chain, "
       "file");
}

PolarizationSpec build_polarization(json& p) {
  const std::string mode = gets(p, "mode", "linear");
  if (mode == "linear") {
    check_keys(p, {"mode", "axis"}, "polarization");
    return PolarizationSpec::linear(get_vec3(p, "axis", Vec3::UnitX()));
  }
  check_keys(p, {"mode"}, "polarization");
  if (mode == "sigma_plus") return PolarizationSpec::sigma_plus();
  if (mode == "sigma_minus") return PolarizationSpec::sigma_minus();
  fail("polarization.mode must be linear, sigma_plus or sigma_minus");
}

CouplingMatrix build_coupling(json& c, const AtomEnsemble& ens,
                              std::vector<std::string>& warnings) {
  const std::string medium = gets(c, "medium", "free_space");
  if (medium == "free_space") {
    check_keys(c, {"medium", "gamma_total", "polarization"}, "coupling");
    json& pol = section(c, "polarization", false, "coupling");
    CouplingMatrix out = free_space_coupling(ens, build_polarization(pol),
                                             getd(c, "gamma_total", 1.0));
    if (out.near_field_warning)
      warnings.push_back(
          "pair separation below xi=0.5: scalar far-field kernel outside its "
          "validity range (min xi = " +
          format_double(out.min_xi) + ")");
    return out;
  }
  if (medium == "waveguide") {
    check_keys(c, {"medium", "gamma_1d", "d_factor", "gamma_ng"}, "coupling");
    ChiralSpec spec;
    spec.gamma_1d = getd(c, "gamma_1d", 1.0);
    spec.d_factor = getd(c, "d_factor", 0.0);
    spec.gamma_ng = getd(c, "gamma_ng", 0.0);
    return waveguide_coupling(ens, spec);
  }
  fail("coupling.medium must be free_space or waveguide");
}

DriveSpec build_drive(json& d, const AtomEnsemble& ens) {
  const std::string type = gets(d, "type", "plane_wave");
  if (type == "none") {
    check_keys(d, {"type", "detuning"}, "drive");
    return undriven(ens.n(), getd(d, "detuning", 0.0));
  }
  const char* extra = type == "plane_wave" ? "k_hat" : "waist";
  check_keys(d, {"type", "rabi", "detuning", extra}, "drive");
  const double rabi = getd(d, "rabi", 0.01);
  const double detuning = getd(d, "detuning", 0.0);
  if (type == "plane_wave")
    return plane_wave_drive(ens, rabi, detuning,
                            get_vec3(d, "k_hat", Vec3::UnitZ()));
  if (type == "gaussian")
    return gaussian_beam_drive(ens, rabi, detuning, reqd(d, "waist", "drive"));
  if (type == "guided") return guided_drive(ens, rabi, detuning);
  fail("drive.type must be plane_wave, gaussian, guided or none");
}

LatticeSpec2D build_lattice(json& l) {
  check_keys(l, {"kind", "a_over_lambda", "eta", "zeeman", "levels"},
             "lattice");
  LatticeSpec2D spec;
  const std::string kind = gets(l, "kind", "honeycomb");
  if (kind == "square")
    spec.kind = LatticeKind::square;
  else if (kind == "rectangular")
    spec.kind = LatticeKind::rectangular;
  else if (kind == "honeycomb")
    spec.kind = LatticeKind::honeycomb;
  else
    fail("lattice.kind must be square, rectangular or honeycomb");
  spec.a = getd(l, "a_over_lambda", 0.05) * kTwoPi;
  spec.eta = getd(l, "eta", 1.0);
  spec.zeeman = getd(l, "zeeman", 0.0);
  const std::string levels = gets(l, "levels", "v_type");
  if (levels == "v_type")
    spec.levels = LevelScheme::v_type;
  else if (levels == "sigma_plus")
    spec.levels = LevelScheme::sigma_plus;
  else if (levels == "sigma_minus")
    spec.levels = LevelScheme::sigma_minus;
  else
    fail("lattice.levels must be v_type, sigma_plus or sigma_minus");
  return spec;
}

struct RunContext {
  std::filesystem::path out;
  json cfg;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
  std::vector<std::string> outputs;

  std::filesystem::path emit(const std::string& name) {
    outputs.push_back(name);
    return out / name;
  }
};

constexpr const char* kCommonKeys[] = {"seed", "output_dir", "threads"};

void check_top(RunContext& ctx, std::initializer_list<const char*> extra) {
  std::vector<const char*> allowed(std::begin(kCommonKeys),
                                   std::end(kCommonKeys));
  allowed.insert(allowed.end(), extra.begin(), extra.end());
  if (!ctx.cfg.is_object()) fail("config must be a JSON object");
  for (auto it = ctx.cfg.begin(); it != ctx.cfg.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) fail("unknown key \"" + it.key() + "\" in config");
  }
}

void run_geometry(RunContext& ctx) {
  check_top(ctx, {"geometry"});
  json& g = section(ctx.cfg, "geometry", true, "config");
  const AtomEnsemble ens = build_geometry(g, ctx.seed);
  write_ensemble_csv(ctx.emit("ensemble.csv"), ens);
  ctx.outputs.push_back("ensemble.csv.json");
}

void run_eigenmodes(RunContext& ctx) {
  check_top(ctx, {"geometry", "coupling"});
  json& g = section(ctx.cfg, "geometry", true, "config");
  const AtomEnsemble ens = build_geometry(g, ctx.seed);
  json& c = section(ctx.cfg, "coupling", false, "config");
  const CouplingMatrix coupling = build_coupling(c, ens, ctx.warnings);
  write_eigenmodes_csv(ctx.emit("eigenmodes.csv"),
                       eigenmodes(coupling, false));
}

void run_evolve(RunContext& ctx) {
  check_top(ctx, {"geometry", "coupling", "drive", "times", "initial_site"});
  json& g = section(ctx.cfg, "geometry", true, "config");
  const AtomEnsemble ens = build_geometry(g, ctx.seed);
  json& c = section(ctx.cfg, "coupling", false, "config");
  const CouplingMatrix coupling = build_coupling(c, ens, ctx.warnings);
  json& d = section(ctx.cfg, "drive", false, "config");
  const DriveSpec drive = build_drive(d, ens);
  json& t = section(ctx.cfg, "times", true, "config");
  const Eigen::VectorXd times = linspace_section(t, "start", "stop", "times");
  const int site = geti(ctx.cfg, "initial_site", -1);
  Eigen::VectorXcd b0 = Eigen::VectorXcd::Zero(ens.n());
  if (site >= 0) {
    if (site >= ens.n()) fail("initial_site outside the ensemble");
    b0[site] = 1.0;
  }
  write_trajectory_csv(ctx.emit("trajectory.csv"),
                       evolve(coupling, drive, b0, times));
}

void run_steady(RunContext& ctx) {
  check_top(ctx, {"geometry", "coupling", "drive"});
  json& g = section(ctx.cfg, "geometry", true, "config");
  const AtomEnsemble ens = build_geometry(g, ctx.seed);
  json& c = section(ctx.cfg, "coupling", false, "config");
  const CouplingMatrix coupling = build_coupling(c, ens, ctx.warnings);
  json& d = section(ctx.cfg, "drive", false, "config");
  const DipoleState ss = steady_state(coupling, build_drive(d, ens));
  Eigen::MatrixXd rows(ens.n(), 4);
  for (int i = 0; i < ens.n(); ++i)
    rows.row(i) << i, ss.b[i].real(), ss.b[i].imag(), std::norm(ss.b[i]);
  write_csv(ctx.emit("steady.csv"), {"idx", "re_b", "im_b", "population"},
            rows);
}

void run_spectrum(RunContext& ctx) {
  check_top(ctx, {"geometry", "coupling", "probe", "detunings"});
  json& g = section(ctx.cfg, "geometry", true, "config");
  const AtomEnsemble ens = build_geometry(g, ctx.seed);
  json& c = section(ctx.cfg, "coupling", false, "config");
  const CouplingMatrix coupling = build_coupling(c, ens, ctx.warnings);
  json& p = section(ctx.cfg, "probe", true, "config");
  check_keys(p, {"kind", "size", "rabi"}, "probe");
  ProbeGeometry probe;
  const std::string kind = gets(p, "kind", "plane");
  if (kind == "plane")
    probe.kind = ProbeGeometry::Kind::plane;
  else if (kind == "gaussian")
    probe.kind = ProbeGeometry::Kind::gaussian;
  else
    fail("probe.kind must be plane or gaussian");
  probe.size = reqd(p, "size", "probe");
  const double rabi = getd(p, "rabi", 0.01);
  json& det = section(ctx.cfg, "detunings", true, "config");
  const Eigen::VectorXd detunings =
      linspace_section(det, "min", "max", "detunings");
  const SpectrumScan scan = spectrum_scan(coupling, ens, rabi, detunings, probe);
  if (!scan.fit.converged)
    ctx.warnings.push_back("lorentzian fit did not converge");
  write_spectrum_csv(ctx.emit("spectrum.csv"), scan);
  write_lorentzian_fit_json(ctx.emit("fit.json"), scan.fit);
}

void run_mirror(RunContext& ctx) {
  check_top(ctx, {"m", "waist_over_lambda", "gamma_total", "spacings"});
  const int m = geti(ctx.cfg, "m", 14);
  const double waist = getd(ctx.cfg, "waist_over_lambda", 3.0);
  const double gamma_total = getd(ctx.cfg, "gamma_total", 1.0);
  json& s = section(ctx.cfg, "spacings", true, "config");
  const Eigen::VectorXd spacings = linspace_section(s, "min", "max", "spacings");
  const MirrorScan scan = mirror_scan(m, spacings, waist, gamma_total);
  write_mirror_csv(ctx.emit("mirror.csv"), scan);
  json minima = json::array();
  for (double v : scan.minima) minima.push_back(v);
  std::ofstream(ctx.emit("mirror_minima.json"))
      << json{{"minima_spacing_over_lambda", minima}}.dump(2) << "\n";
}

void run_wg_phase(RunContext& ctx) {
  check_top(ctx, {"n", "rabi", "detuning", "input", "gamma_1d", "gamma_ng",
                  "d_values", "xi_over_pi_values"});
  const int n = geti(ctx.cfg, "n", 50);
  const double rabi = getd(ctx.cfg, "rabi", 0.01);
  const double detuning = getd(ctx.cfg, "detuning", 0.0);
  const double gamma_1d = getd(ctx.cfg, "gamma_1d", 1.0);
  const double gamma_ng = getd(ctx.cfg, "gamma_ng", 0.0);
  const std::string input_name = gets(ctx.cfg, "input", "left");
  GuidedInput input;
  if (input_name == "left")
    input = GuidedInput::left;
  else if (input_name == "right")
    input = GuidedInput::right;
  else if (input_name == "transverse")
    input = GuidedInput::transverse;
  else
    fail("input must be left, right or transverse");
  if (!ctx.cfg.contains("d_values") || !ctx.cfg["d_values"].is_array())
    fail("d_values must be an array");
  if (!ctx.cfg.contains("xi_over_pi_values") ||
      !ctx.cfg["xi_over_pi_values"].is_array())
    fail("xi_over_pi_values must be an array");
  std::vector<PhaseMapRow> rows;
  for (const auto& dv : ctx.cfg["d_values"]) {
    ChiralSpec spec;
    spec.gamma_1d = gamma_1d;
    spec.gamma_ng = gamma_ng;
    spec.d_factor = dv.get<double>();
    for (const auto& xv : ctx.cfg["xi_over_pi_values"]) {
      const double xi_over_pi = xv.get<double>();
      const ChainSteadyState out = driven_chain_steady_state(
          n, xi_over_pi * kPi, spec, rabi, detuning, input);
      rows.push_back({spec.d_factor, xi_over_pi, out.diagnostics});
    }
  }
  write_phase_map_csv(ctx.emit("phase_map.csv"), rows);
}

void run_wg_quench(RunContext& ctx) {
  check_top(ctx, {"zones", "initial_site", "times", "gamma_1d", "d_factor",
                  "gamma_ng"});
  if (!ctx.cfg.contains("zones") || !ctx.cfg["zones"].is_array())
    fail("zones must be an array of {n, xi_over_pi}");
  std::vector<ZoneSpec> zones;
  int total = 0;
  for (auto& z : ctx.cfg["zones"]) {
    check_keys(z, {"n", "xi_over_pi"}, "zones[]");
    ZoneSpec zs;
    zs.n = z.at("n").get<int>();
    zs.xi = z.at("xi_over_pi").get<double>() * kPi;
    total += zs.n;
    zones.push_back(zs);
  }
  const int site = geti(ctx.cfg, "initial_site", total / 2);
  json& t = section(ctx.cfg, "times", true, "config");
  const Eigen::VectorXd times = linspace_section(t, "start", "stop", "times");
  ChiralSpec spec;
  spec.gamma_1d = getd(ctx.cfg, "gamma_1d", 1.0);
  spec.d_factor = getd(ctx.cfg, "d_factor", 0.0);
  spec.gamma_ng = getd(ctx.cfg, "gamma_ng", 0.0);
  write_quench_csv(ctx.emit("quench.csv"),
                   quench_zones(zones, site, times, spec));
}

void run_bands(RunContext& ctx) {
  check_top(ctx, {"lattice", "r_cut_over_a", "per_segment", "k_points"});
  json& l = section(ctx.cfg, "lattice", false, "config");
  const LatticeSpec2D spec = build_lattice(l);
  const double r_cut = getd(ctx.cfg, "r_cut_over_a", 10.0) * spec.a;
  std::vector<Vec2> path;
  if (ctx.cfg.contains("k_points")) {
    if (!ctx.cfg["k_points"].is_array()) fail("k_points must be an array");
    for (const auto& kp : ctx.cfg["k_points"]) {
      if (!kp.is_array() || kp.size() != 2) fail("k_points entries are [kx,ky]");
      path.emplace_back(kp[0].get<double>(), kp[1].get<double>());
    }
  } else {
    path = high_symmetry_path(spec, geti(ctx.cfg, "per_segment", 40));
  }
  const BandSet bands = band_structure(spec, path, r_cut);
  if (bands.tail_warning)
    ctx.warnings.push_back("lattice sum tail estimate " +
                           format_double(bands.tail_bound) +
                           " suggests increasing r_cut");
  write_bands_csv(ctx.emit("bands.csv"), bands);
}

void run_chern(RunContext& ctx) {
  check_top(ctx, {"lattice", "r_cut_over_a", "grid", "gap_threshold"});
  json& l = section(ctx.cfg, "lattice", false, "config");
  const LatticeSpec2D spec = build_lattice(l);
  const double r_cut = getd(ctx.cfg, "r_cut_over_a", 10.0) * spec.a;
  const int grid = geti(ctx.cfg, "grid", 40);
  const double threshold = getd(ctx.cfg, "gap_threshold", 1e-6);
  write_chern_json(ctx.emit("chern.json"),
                   chern_numbers(spec, grid, r_cut, threshold));
}

void run_ribbon(RunContext& ctx) {
  check_top(ctx, {"lattice", "r_cut_over_a", "width", "k_par_over_pi_a"});
  json& l = section(ctx.cfg, "lattice", false, "config");
  if (!l.contains("kind")) l["kind"] = "rectangular";
  if (!l.contains("levels")) l["levels"] = "sigma_plus";
  const LatticeSpec2D spec = build_lattice(l);
  const double r_cut = getd(ctx.cfg, "r_cut_over_a", 10.0) * spec.a;
  const int width = geti(ctx.cfg, "width", 80);
  const double k_par =
      getd(ctx.cfg, "k_par_over_pi_a", 0.1) * kPi / spec.a;
  write_ribbon_csv(ctx.emit("ribbon.csv"),
                   ribbon_spectrum(spec, width, k_par, r_cut));
}

void run_oracle(RunContext& ctx) {
  check_top(ctx, {"geometry", "coupling", "drive"});
  json& g = section(ctx.cfg, "geometry", false, "config");
  if (!g.contains("kind")) {
    g["kind"] = "gaussian_cloud";
    g["n"] = 3;
  }
  const AtomEnsemble ens = build_geometry(g, ctx.seed);
  if (ens.n() > kMaxExactAtoms)
    fail("oracle comparison needs n <= " + std::to_string(kMaxExactAtoms));
  json& c = section(ctx.cfg, "coupling", false, "config");
  const CouplingMatrix coupling = build_coupling(c, ens, ctx.warnings);
  json& d = section(ctx.cfg, "drive", false, "config");
  const DriveSpec drive = build_drive(d, ens);
  const DipoleState dipole = steady_state(coupling, drive);
  const Eigen::MatrixXcd rho = exact_steady_state(coupling, drive);
  const Eigen::VectorXcd sigma = sigma_expectations(rho, ens.n());
  Eigen::MatrixXd rows(ens.n(), 5);
  double worst = 0;
  for (int i = 0; i < ens.n(); ++i) {
    rows.row(i) << i, sigma[i].real(), sigma[i].imag(), dipole.b[i].real(),
        dipole.b[i].imag();
    worst = std::max(worst, std::abs(sigma[i] - dipole.b[i]) /
                                std::max(std::abs(sigma[i]), 1e-300));
  }
  write_csv(ctx.emit("oracle.csv"),
            {"idx", "re_sigma", "im_sigma", "re_b", "im_b"}, rows);
  std::ofstream(ctx.emit("oracle_summary.json"))
      << json{{"max_relative_error", worst}}.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"collective emitter dynamics toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  struct SubSpec {
    const char* name;
    const char* desc;
    void (*run)(RunContext&);
  };
  const SubSpec subs[] = {
      {"geometry", "generate an emitter configuration", run_geometry},
      {"eigenmodes", "collective decay rates and shifts", run_eigenmodes},
      {"evolve", "time evolution of dipole amplitudes", run_evolve},
      {"steady", "steady-state dipole amplitudes", run_steady},
      {"spectrum", "transmission spectrum with Lorentzian dip fit", run_spectrum},
      {"mirror", "resonant |T|^2 of a square array vs lattice spacing", run_mirror},
      {"wg-phase", "chiral-chain steady-state phase diagnostics", run_wg_phase},
      {"wg-quench", "zoned-chain quench with per-zone populations", run_wg_quench},
      {"bands", "Bloch bands along a k path", run_bands},
      {"chern", "Chern numbers on a BZ grid", run_chern},
      {"ribbon", "open-boundary ribbon spectrum with localization", run_ribbon},
      {"oracle", "dipole model vs exact master equation", run_oracle},
  };

  std::string config_path;
  std::string outdir_flag;
  for (const SubSpec& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.desc);
    sub->add_option("-c,--config", config_path, "JSON config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--output-dir", outdir_flag,
                    "output directory (overrides config and PMDDI_OUTPUT_DIR)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string chosen = app.get_subcommands().at(0)->get_name();
  const auto t0 = std::chrono::steady_clock::now();
  RunContext ctx;
  try {
    std::ifstream in(config_path);
    ctx.cfg = json::parse(in);
    if (!ctx.cfg.is_object()) fail("config must be a JSON object");
    ctx.seed = static_cast<std::uint64_t>(geti(ctx.cfg, "seed", 0));
    const int threads = geti(ctx.cfg, "threads", 1);
    if (threads < 1) fail("threads must be >= 1");
    Eigen::setNbThreads(threads);
    std::string outdir = outdir_flag;
    if (outdir.empty()) outdir = gets(ctx.cfg, "output_dir", "");
    if (outdir.empty())
      if (const char* env = std::getenv("PMDDI_OUTPUT_DIR")) outdir = env;
    if (outdir.empty()) outdir = ".";
    ctx.cfg["output_dir"] = outdir;
    ctx.out = outdir;
    std::filesystem::create_directories(ctx.out);

    for (const SubSpec& s : subs)
      if (chosen == s.name) {
        s.run(ctx);
        break;
      }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    write_manifest(ctx.out, ctx.cfg.dump(), kVersion, wall, ctx.warnings,
                   ctx.outputs);
    return 0;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    if (!ctx.out.empty()) {
      std::ofstream diag(ctx.out / "error.json");
      diag << nlohmann::json{{"type", "numerical"}, {"error", e.what()}}.dump(2)
           << "\n";
    }
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
