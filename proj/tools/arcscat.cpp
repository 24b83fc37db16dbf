// Command-line driver: synthesize far-field data, reconstruct cracks,
// run the sampling initializer, and emit verification artifacts.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

#include <arcscat/arcscat.hpp>

namespace fs = std::filesystem;
using namespace arcscat;

namespace {

struct Opts {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  bool fd_jacobian = false;
  bool init_from_dsm = false;
};

void add_common(CLI::App* sub, Opts& o) {
  sub->add_option("--config", o.config, "JSON run configuration")->required();
  sub->add_option("--out", o.out, "output directory (created if missing)");
  sub->add_option("--seed", o.seed, "override the config seed");
}

int stage_n(const RunConfig& rc, double k) {
  return rc.n_nodes > 0 ? rc.n_nodes : auto_nodes(k);
}

void require_valid_truth(const RunConfig& rc) {
  if (rc.cracks_truth.empty())
    throw std::runtime_error("config must provide cracks_truth for this command");
  CrackSet cs{rc.cracks_truth, rc.newton.d_min};
  ValidityReport rep = validity_check(cs);
  if (!rep.ok)
    throw std::runtime_error("cracks_truth fails validity: " +
                             (rep.problems.empty() ? "unknown" : rep.problems.front()));
}

int cmd_synth(const Opts& o) {
  RunConfig rc = load_config(o.config, o.seed);
  require_valid_truth(rc);
  CrackSet cs{rc.cracks_truth, rc.newton.d_min};
  std::vector<Vec2> dirs = observation_directions(rc.n_obs);
  fs::create_directories(o.out);
  std::vector<nlohmann::json> files;
  std::size_t idx = 0;
  for (std::size_t fi = 0; fi < rc.frequencies.size(); ++fi) {
    double k = rc.frequencies[fi].k;
    std::vector<NystromGrid> grids = build_grids(cs, stage_n(rc, k));
    std::vector<DensitySolution> sols = solve_density(grids, k, rc.incident_dirs);
    for (std::size_t di = 0; di < rc.incident_dirs.size(); ++di) {
      FarFieldSet ff = far_field(sols[di], dirs);
      std::uint64_t seed_used = rc.seed + idx;
      ff = add_noise(ff, rc.delta, seed_used);
      std::string name = farfield_file_name(fi, di);
      write_farfield_csv((fs::path(o.out) / name).string(), ff, rc.hash);
      nlohmann::json e;
      e["file"] = name;
      e["k"] = k;
      e["d"] = {rc.incident_dirs[di].x, rc.incident_dirs[di].y};
      e["delta"] = rc.delta;
      e["seed"] = seed_used;
      files.push_back(e);
      ++idx;
    }
  }
  write_manifest((fs::path(o.out) / "manifest.json").string(), rc, files);
  return 0;
}

// Reads the measurement files and groups them into frequency stages following
// the order in the config. Explicit data_files are matched to frequencies by
// the k stored in each file; otherwise the conventional synth names inside the
// output directory are used.
std::vector<StageData> load_stages(const RunConfig& rc, const Opts& o) {
  std::vector<FarFieldSet> sets;
  if (!rc.data_files.empty()) {
    fs::path cfg_dir = fs::path(o.config).parent_path();
    for (const std::string& f : rc.data_files) {
      fs::path p = f;
      if (p.is_relative()) {
        if (fs::exists(cfg_dir / p))
          p = cfg_dir / p;
        else if (fs::exists(fs::path(o.out) / p))
          p = fs::path(o.out) / p;
      }
      sets.push_back(read_farfield_csv(p.string()));
    }
  } else {
    for (std::size_t fi = 0; fi < rc.frequencies.size(); ++fi)
      for (std::size_t di = 0; di < rc.incident_dirs.size(); ++di) {
        fs::path p = fs::path(o.out) / farfield_file_name(fi, di);
        if (!fs::exists(p))
          throw std::runtime_error("missing data file " + p.string() +
                                   " (run synth first or set data_files)");
        sets.push_back(read_farfield_csv(p.string()));
      }
  }
  const bool multi = rc.frequencies.size() > 1;
  std::vector<StageData> stages;
  for (std::size_t fi = 0; fi < rc.frequencies.size(); ++fi) {
    StageData sd;
    sd.k = rc.frequencies[fi].k;
    sd.n = stage_n(rc, sd.k);
    if (rc.frequencies[fi].eps_target)
      sd.eps_target = rc.frequencies[fi].eps_target;
    else if (multi)
      sd.eps_target = fi == 0 ? 0.001 : std::max(0.01, rc.delta / 2.0);
    for (const FarFieldSet& s : sets) {
      double tol = 1e-9 * std::max(1.0, sd.k);
      if (std::fabs(s.k - sd.k) <= tol) sd.sets.push_back(s);
    }
    if (sd.sets.empty())
      throw std::runtime_error("no data file matches frequency k=" + fmt17(sd.k));
    stages.push_back(std::move(sd));
  }
  std::size_t used = 0;
  for (const auto& sd : stages) used += sd.sets.size();
  if (used != sets.size())
    throw std::runtime_error("some data files match no configured frequency");
  return stages;
}

int cmd_invert(const Opts& o) {
  RunConfig rc = load_config(o.config, o.seed);
  std::vector<StageData> stages = load_stages(rc, o);
  fs::create_directories(o.out);

  std::vector<ChebCrack> init = rc.cracks_init;
  if (init.empty() && o.init_from_dsm) {
    IndicatorGrid g = dsm_indicator(stages[0].sets[0], rc.dsm.xmin, rc.dsm.xmax, rc.dsm.ymin,
                                    rc.dsm.ymax, rc.dsm.spacing);
    ExtractionResult ex = extract_initial_cracks(g, rc.dsm.n_cracks);
    if (ex.cracks.empty()) throw std::runtime_error("sampling initializer found no components");
    init = ex.cracks;
  }
  if (init.empty())
    throw std::runtime_error("no initial guess: provide cracks_init or pass --init-from-dsm");

  NewtonConfig ncfg = rc.newton;
  if (o.fd_jacobian) ncfg.use_fd = true;

  ReconstructionState st = run_multi_freq(init, stages, ncfg);

  write_reconstruction_json((fs::path(o.out) / "reconstruction.json").string(), st, rc.hash);
  write_iteration_log((fs::path(o.out) / "iterations.csv").string(), st.history, rc.hash);
  write_polyline_csv((fs::path(o.out) / "reconstruction_curves.csv").string(), st.cracks,
                     rc.hash);
  if (st.target_missed) {
    std::cerr << "target missed: J_r=" << fmt17(st.J_r)
              << (st.note.empty() ? "" : ("; " + st.note)) << "\n";
    return 2;
  }
  return 0;
}

int cmd_dsm(const Opts& o) {
  RunConfig rc = load_config(o.config, o.seed);
  std::vector<StageData> stages = load_stages(rc, o);
  fs::create_directories(o.out);
  IndicatorGrid g = dsm_indicator(stages[0].sets[0], rc.dsm.xmin, rc.dsm.xmax, rc.dsm.ymin,
                                  rc.dsm.ymax, rc.dsm.spacing);
  write_indicator_csv((fs::path(o.out) / "indicator.csv").string(), g, rc.hash);
  write_heatmap_gnuplot((fs::path(o.out) / "indicator.gp").string(), "indicator.csv",
                        "sampling indicator");
  ExtractionResult ex = extract_initial_cracks(g, rc.dsm.n_cracks);
  GridMax gm = indicator_max(g);
  nlohmann::json j;
  j["version"] = artifact_version;
  j["config_hash"] = hash_hex(rc.hash);
  j["components_found"] = ex.components_found;
  j["shortage"] = ex.shortage;
  j["max"] = {{"x", gm.x}, {"y", gm.y}, {"value", gm.value}};
  j["cracks"] = nlohmann::json::array();
  for (const auto& c : ex.cracks) j["cracks"].push_back(crack_to_json(c));
  std::ofstream os((fs::path(o.out) / "initial_cracks.json").string());
  if (!os) throw std::runtime_error("cannot open initial_cracks.json for writing");
  os << j.dump(2) << "\n";
  return 0;
}

// Probe ring around the configured geometry for the low-frequency comparison.
std::vector<Vec2> probe_ring(const CrackSet& cs) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const Crack& cr : cs.cracks)
    for (const Vec2& p : polyline(cr, 201)) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  Vec2 c{0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
  double r = std::max(0.5 * (xmax - xmin), 0.5 * (ymax - ymin)) + 1.5;
  std::vector<Vec2> pts;
  for (int j = 0; j < 16; ++j) {
    double a = 2.0 * pi * j / 16.0;
    pts.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  return pts;
}

int cmd_lowfreq_check(const Opts& o) {
  RunConfig rc = load_config(o.config, o.seed);
  require_valid_truth(rc);
  CrackSet cs{rc.cracks_truth, rc.newton.d_min};
  int n = rc.n_nodes > 0 ? rc.n_nodes : 128;
  fs::create_directories(o.out);

  std::vector<Vec2> pts = probe_ring(cs);
  std::vector<AsymptoticRow> rows =
      asymptotic_check(cs, n, rc.lowfreq_ks, pts, rc.incident_dirs[0]);
  write_asymptotic_csv((fs::path(o.out) / "asymptotic.csv").string(), rows, rc.hash);

  LaplaceProfile prof = solve_profile(cs, n);
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const Crack& cr : cs.cracks)
    for (const Vec2& p : polyline(cr, 201)) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  const double pad = 2.0, spacing = 0.1;
  double x0 = xmin - pad, y0 = ymin - pad;
  int nx = static_cast<int>(std::floor((xmax + pad - x0) / spacing + 0.5)) + 1;
  int ny = static_cast<int>(std::floor((ymax + pad - y0) / spacing + 0.5)) + 1;
  std::vector<std::vector<double>> vals(ny, std::vector<double>(nx));
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      vals[iy][ix] = eval_v(prof, cs, {x0 + spacing * ix, y0 + spacing * iy});
  write_scalar_grid_csv((fs::path(o.out) / "vgrid.csv").string(), x0, y0, spacing, vals,
                        rc.hash);
  write_heatmap_gnuplot((fs::path(o.out) / "vgrid.gp").string(), "vgrid.csv",
                        "harmonic profile v");
  return 0;
}

int cmd_gradcheck(const Opts& o) {
  RunConfig rc = load_config(o.config, o.seed);
  require_valid_truth(rc);
  CrackSet cs{rc.cracks_truth, rc.newton.d_min};
  std::vector<Vec2> dirs = observation_directions(rc.n_obs);
  fs::create_directories(o.out);
  for (std::size_t fi = 0; fi < rc.frequencies.size(); ++fi) {
    double k = rc.frequencies[fi].k;
    int n = stage_n(rc, k);
    DensitySolution sol = solve_density(cs, n, k, rc.incident_dirs[0]);
    std::vector<bool> horiz(cs.size(), true);
    JacobianBlock ja = jacobian(sol, rc.newton.m_p, horiz, dirs);
    JacobianBlock jf = fd_jacobian(cs, n, k, rc.incident_dirs[0], rc.newton.m_p, horiz,
                                   rc.newton.fd_eps, dirs);
    std::vector<GradCheckRow> rows;
    for (int j = 0; j < ja.J.cols(); ++j) {
      GradCheckRow r;
      r.basis_index = j;
      r.analytic_norm = ja.J.col(j).norm();
      r.fd_norm = jf.J.col(j).norm();
      double den = std::max(r.analytic_norm, 1e-300);
      r.rel_err = (ja.J.col(j) - jf.J.col(j)).norm() / den;
      rows.push_back(r);
    }
    std::string name = rc.frequencies.size() == 1
                           ? std::string("gradcheck.csv")
                           : "gradcheck_f" + std::to_string(fi) + ".csv";
    write_gradcheck_csv((fs::path(o.out) / name).string(), rows, rc.hash);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boundary-integral crack scattering: forward synthesis and reconstruction"};
  app.require_subcommand(1);

  Opts o_synth, o_invert, o_dsm, o_low, o_grad;
  CLI::App* s_synth = app.add_subcommand("synth", "solve the forward problem and write far-field CSVs");
  add_common(s_synth, o_synth);
  CLI::App* s_invert = app.add_subcommand("invert", "reconstruct cracks from far-field data");
  add_common(s_invert, o_invert);
  s_invert->add_flag("--fd-jacobian", o_invert.fd_jacobian,
                     "use the finite-difference Jacobian fallback");
  s_invert->add_flag("--init-from-dsm", o_invert.init_from_dsm,
                     "build the initial guess with the sampling indicator");
  CLI::App* s_dsm = app.add_subcommand("dsm", "compute the sampling indicator grid");
  add_common(s_dsm, o_dsm);
  CLI::App* s_low = app.add_subcommand("lowfreq-check", "low-wavenumber asymptotics artifacts");
  add_common(s_low, o_low);
  CLI::App* s_grad = app.add_subcommand("gradcheck", "analytic vs finite-difference Jacobian");
  add_common(s_grad, o_grad);

  CLI11_PARSE(app, argc, argv);

  try {
    if (s_synth->parsed()) return cmd_synth(o_synth);
    if (s_invert->parsed()) return cmd_invert(o_invert);
    if (s_dsm->parsed()) return cmd_dsm(o_dsm);
    if (s_low->parsed()) return cmd_lowfreq_check(o_low);
    if (s_grad->parsed()) return cmd_gradcheck(o_grad);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
