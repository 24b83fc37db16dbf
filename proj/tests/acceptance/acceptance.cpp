// Acceptance gate: exercises the shipped configurations end to end and prints
// one PASS/FAIL line per criterion.  Exit status is the number of failures.
//
// Usage: acceptance <path-to-cli-binary> <path-to-configs-dir>

#include <arcscat/arcscat.hpp>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace arcscat;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Gate {
  int failures = 0;
  void report(int id, bool ok, const std::string& msg) {
    if (!ok) ++failures;
    std::cout << "CRITERION " << id << ": " << (ok ? "PASS" : "FAIL") << " — " << msg << "\n"
              << std::flush;
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// Far-field synthesis mirroring the command-line synth path (including its
// per-file seed convention seed + running file index).
FarFieldSet synth(const CrackSet& cs, int n, double k, const Vec2& d, int n_obs, double delta,
                  std::uint64_t seed) {
  FarFieldSet ff = far_field(solve_density(cs, n, k, d), observation_directions(n_obs));
  return add_noise(ff, delta, seed);
}

StageData stage_from(const RunConfig& rc, std::size_t fi, std::uint64_t seed) {
  const double k = rc.frequencies[fi].k;
  const int n = rc.n_nodes > 0 ? rc.n_nodes : auto_nodes(k);
  StageData sd;
  sd.k = k;
  sd.n = n;
  sd.eps_target = rc.frequencies[fi].eps_target;
  sd.sets.push_back(synth(CrackSet{rc.cracks_truth, rc.newton.d_min}, n, k,
                          rc.incident_dirs[0], rc.n_obs, rc.delta, seed));
  return sd;
}

double dist_to_crack_set(const CrackSet& cs, const Vec2& p) {
  double best = 1e300;
  for (const Crack& cr : cs.cracks)
    for (const Vec2& q : polyline(cr, 400))
      best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
  return best;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

int run_cli(const std::string& cli, const std::string& args, const fs::path& log) {
  const std::string cmd = "\"" + cli + "\" " + args + " >> \"" + log.string() + "\" 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// ---------------------------------------------------------------- criterion 1
// Noise-free three-crack reconstruction pinned to the published coefficients.
const double pin_clean[7] = {1.000, 0.486, 0.273, 0.219, -0.219, -0.032, -0.073};
const double pin_noise[7] = {1.016, 0.493, 0.280, 0.212, -0.224, -0.034, -0.070};

std::vector<double> crack0_vector(const ReconstructionState& st) {
  const ChebCrack& c = st.cracks.at(0);
  std::vector<double> v{c.d0, c.d1};
  for (std::size_t i = 0; i < 5; ++i) v.push_back(i < c.c.size() ? c.c[i] : 0.0);
  return v;
}

bool criterion1(const fs::path& configs, std::string& msg) {
  const auto t0 = Clock::now();
  RunConfig rc = load_config((configs / "three_cracks.json").string());
  std::vector<StageData> stages{stage_from(rc, 0, rc.seed)};
  ReconstructionState st = run_multi_freq(rc.cracks_init, stages, rc.newton);
  const std::vector<double> got = crack0_vector(st);
  double worst = 0.0;
  for (int i = 0; i < 7; ++i) worst = std::max(worst, std::abs(got[i] - pin_clean[i]));
  const double el = seconds_since(t0);
  std::ostringstream os;
  os << "first-crack coefficients (";
  for (int i = 0; i < 7; ++i) os << (i ? ", " : "") << fmt(got[i]);
  os << "), max deviation " << fmt(worst) << " (allowed 0.02), J_r " << fmt(st.J_r) << ", "
     << fmt(el) << " s (limit 60)";
  msg = os.str();
  return worst <= 0.02 && el <= 60.0 && st.note.empty();
}

// ---------------------------------------------------------------- criterion 2
bool criterion2(const fs::path& configs, std::string& msg) {
  RunConfig rc = load_config((configs / "three_cracks_noise.json").string());
  std::vector<std::vector<double>> rows;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::vector<StageData> stages{stage_from(rc, 0, seed)};
    ReconstructionState st = run_multi_freq(rc.cracks_init, stages, rc.newton);
    rows.push_back(crack0_vector(st));
  }
  std::vector<double> mean(7, 0.0);
  for (const auto& r : rows)
    for (int i = 0; i < 7; ++i) mean[i] += r[i] / rows.size();
  double worst = 0.0, spread = 0.0;
  for (int i = 0; i < 7; ++i) {
    worst = std::max(worst, std::abs(mean[i] - pin_noise[i]));
    for (const auto& r : rows) spread = std::max(spread, std::abs(r[i] - mean[i]));
  }
  std::ostringstream os;
  os << "five-seed mean (";
  for (int i = 0; i < 7; ++i) os << (i ? ", " : "") << fmt(mean[i]);
  os << "), max deviation " << fmt(worst) << " (allowed 0.05); per-seed spread " << fmt(spread)
     << " (reported, not asserted)";
  msg = os.str();
  return worst <= 0.05;
}

// ---------------------------------------------------------------- criterion 3
bool criterion3(const fs::path& configs, std::string& msg) {
  const auto t0 = Clock::now();
  RunConfig rc = load_config((configs / "wavy_twofreq.json").string());
  std::vector<StageData> stages;
  for (std::size_t fi = 0; fi < rc.frequencies.size(); ++fi)
    stages.push_back(stage_from(rc, fi, rc.seed + fi));
  ReconstructionState st = run_multi_freq(rc.cracks_init, stages, rc.newton);

  const Crack& truth = rc.cracks_truth.at(0);
  const ChebCrack& rec = st.cracks.at(0);
  double dev = 0.0;
  const int ns = 81;
  for (int q = 0; q < ns; ++q) {
    const double s = -0.8 + 1.6 * q / (ns - 1);
    const double xr = rec.d0 + rec.d1 * s;
    const double yr = cheb_series(rec.c, s).v;
    const double xs = std::clamp(xr, -1.0, 1.0);
    dev += std::abs(yr - crack_jet(truth, xs).p.y) / ns;
  }
  const double el = seconds_since(t0);
  std::ostringstream os;
  os << "two-stage run: J_r " << fmt(st.J_r) << " (allowed 0.01), mean vertical deviation "
     << fmt(dev) << " (allowed 0.05), final order " << st.p
     << (st.target_missed ? ", final target missed" : ", final target reached") << ", " << fmt(el)
     << " s";
  msg = os.str();
  return st.J_r <= 0.01 && dev <= 0.05;
}

// ---------------------------------------------------------------- criterion 4
bool criterion4(const fs::path& configs, std::string& msg) {
  const auto t0 = Clock::now();
  RunConfig rc = load_config((configs / "lowfreq_probe.json").string());
  const CrackSet cs{rc.cracks_truth, rc.newton.d_min};
  const int n = rc.n_nodes > 0 ? rc.n_nodes : 128;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const Crack& cr : cs.cracks)
    for (const Vec2& p : polyline(cr, 201)) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  const Vec2 ctr{0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
  const double rad = std::max(0.5 * (xmax - xmin), 0.5 * (ymax - ymin)) + 1.5;
  std::vector<Vec2> pts;
  for (int j = 0; j < 16; ++j) {
    const double a = 2.0 * pi * j / 16.0;
    pts.push_back({ctr.x + rad * std::cos(a), ctr.y + rad * std::sin(a)});
  }

  const auto rows = asymptotic_check(cs, n, rc.lowfreq_ks, pts, rc.incident_dirs[0]);
  const bool decreasing = rows.size() == 3 && rows[0].e > rows[1].e && rows[1].e > rows[2].e;
  const double ratio = rows[2].e / rows[1].e;

  const LaplaceProfile prof = solve_profile(cs, n);
  double on_curve = 0.0;
  for (const Crack& cr : cs.cracks)
    for (int q = 0; q < 39; ++q) {
      const double s = -0.95 + 1.9 * q / 38.0;
      on_curve = std::max(on_curve, std::abs(eval_v(prof, cs, eval_crack(cr, s))));
    }
  double vmin_off = 1e300;
  for (double x = xmin - 1.5; x <= xmax + 1.5; x += 0.4)
    for (double y = ymin - 1.5; y <= ymax + 1.5; y += 0.4) {
      const Vec2 p{x, y};
      if (dist_to_crack_set(cs, p) < 0.12) continue;
      vmin_off = std::min(vmin_off, eval_v(prof, cs, p));
    }
  double far_drift = 0.0;
  for (double ang : {0.3, 2.1}) {
    const Vec2 e{std::cos(ang), std::sin(ang)};
    const double g3 = eval_v(prof, cs, {1e3 * e.x, 1e3 * e.y}) - std::log(1e3) / (2.0 * pi);
    const double g6 = eval_v(prof, cs, {1e6 * e.x, 1e6 * e.y}) - std::log(1e6) / (2.0 * pi);
    far_drift = std::max(far_drift, std::abs(g3 - g6));
  }
  const double el = seconds_since(t0);
  std::ostringstream os;
  os << "e(k) = (" << fmt(rows[0].e) << ", " << fmt(rows[1].e) << ", " << fmt(rows[2].e)
     << "), ratio " << fmt(ratio) << " (allowed 0.3..0.7); profile on-curve max " << fmt(on_curve)
     << " (allowed 1e-4), off-curve min " << fmt(vmin_off) << " (> 0), far drift "
     << fmt(far_drift) << " (allowed 1e-3), " << fmt(el) << " s (limit 30)";
  msg = os.str();
  return decreasing && ratio >= 0.3 && ratio <= 0.7 && on_curve <= 1e-4 && vmin_off > 0.0 &&
         far_drift <= 1e-3 && el <= 30.0;
}

// ---------------------------------------------------------------- criterion 5
bool criterion5(const fs::path& configs, std::string& msg) {
  RunConfig ra = load_config((configs / "three_cracks.json").string());
  RunConfig rb = load_config((configs / "wavy_twofreq.json").string());
  const auto dirs = observation_directions(32);
  const Vec2 d{1.0, 0.0};

  double worst_rel = 0.0;
  for (const RunConfig* rc : {&ra, &rb}) {
    const CrackSet cs{rc->cracks_truth, rc->newton.d_min};
    for (double k : {1.0, 3.0}) {
      const auto sol = solve_density(cs, 48, k, d);
      const auto ja = jacobian(sol, 3, true, dirs);
      const auto jf = fd_jacobian(cs, 48, k, d, 3, true, 1e-5, dirs);
      worst_rel = std::max(worst_rel, (ja.J - jf.J).norm() / jf.J.norm());
    }
  }

  // Tangential null-space clause: the null tangential displacements are the
  // endpoint-fixed slides h = w(s) z'(s), w(+-1) = 0 — pure reparameterizations
  // of the same arc.  (A slide with tip motion changes the scatterer: rigid
  // translation of a flat crack is tangential yet phase-modulates the far field.)
  const CrackSet csb{rb.cracks_truth, rb.newton.d_min};
  const auto sol = solve_density(csb, 128, 3.0, d);
  DerivAssembly da(sol.grids, 3.0);
  const auto& g = sol.grids[0];
  std::vector<Vec2> h(g.n), dh(g.n);
  for (int j = 0; j < g.n; ++j) {
    const double s = g.s[j];
    const CurveJet J = crack_jet(csb.cracks[0], s);
    const double w = 1.0 - s * s, dw = -2.0 * s;
    h[j] = Vec2{w * J.d.x, w * J.d.y};
    dh[j] = Vec2{dw * J.d.x + w * J.dd.x, dw * J.d.y + w * J.dd.y};
  }
  const auto tang = frechet_farfield(sol, da, make_field(sol.grids, 0, h, dh), dirs);
  const auto vert = frechet_farfield(sol, da, make_vertical_cheb(sol.grids, 0, 0), dirs);
  double nt = 0.0, nv = 0.0;
  for (std::size_t r = 0; r < tang.size(); ++r) {
    nt += std::norm(tang[r]);
    nv += std::norm(vert[r]);
  }
  const double tang_ratio = std::sqrt(nt / nv);

  const auto grids24 = build_grids(csb, 24);
  DerivAssembly da24(grids24, 2.0);
  Perturbation pert;
  pert.parts.resize(1);
  pert.parts[0].h.resize(24);
  pert.parts[0].dh.resize(24);
  for (int j = 0; j < 24; ++j) {
    const double s = grids24[0].s[j];
    pert.parts[0].h[j] = {0.3 - 0.1 * s, 0.2 + s * s};
    pert.parts[0].dh[j] = {-0.1, 2.0 * s};
  }
  const MatC Sp = da24.materialize(pert);
  const MatC S0 = assemble_system(grids24, 2.0);
  const auto defect = [&](double eps) {
    auto pg = grids24;
    pg[0] = perturb_grid(grids24[0], pert.parts[0], eps);
    return (assemble_system(pg, 2.0) - S0 - eps * Sp).norm();
  };
  const double order = std::log2(defect(1e-3) / defect(5e-4));

  std::ostringstream os;
  os << "analytic-vs-FD relative error " << fmt(worst_rel)
     << " (allowed 1e-4) over both geometries at k in {1,3}; endpoint-fixed tangential ratio "
     << fmt(tang_ratio) << " (allowed 1e-4); matrix-derivative Taylor order " << fmt(order)
     << " (required >= 1.9)";
  msg = os.str();
  return worst_rel <= 1e-4 && tang_ratio <= 1e-4 && order >= 1.9;
}

// ---------------------------------------------------------------- criterion 6
bool criterion6(const fs::path& configs, std::string& msg) {
  RunConfig rc = load_config((configs / "three_cracks.json").string());
  const CrackSet cs{rc.cracks_truth, rc.newton.d_min};
  const double k = 3.0;
  const auto dirs = observation_directions(32);

  const auto grids = build_grids(cs, 64);
  const auto sols = solve_density(grids, k, dirs);
  std::vector<std::vector<cplx>> F(32);
  double fmax = 0.0;
  for (int di = 0; di < 32; ++di) {
    const FarFieldSet ff = far_field(sols[di], dirs);
    F[di] = ff.values;
    for (const cplx& v : ff.values) fmax = std::max(fmax, std::abs(v));
  }
  double recip = 0.0;
  for (int di = 0; di < 32; ++di)
    for (int xi = 0; xi < 32; ++xi)
      recip = std::max(recip, std::abs(F[di][xi] - F[(xi + 16) % 32][(di + 16) % 32]) / fmax);

  const Vec2 d{1.0, 0.0};
  const FarFieldSet f64 = far_field(solve_density(cs, 64, k, d), dirs);
  const FarFieldSet f128 = far_field(solve_density(cs, 128, k, d), dirs);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 32; ++i) {
    num += std::norm(f64.values[i] - f128.values[i]);
    den += std::norm(f128.values[i]);
  }
  const double conv = std::sqrt(num / den);

  const auto sol = solve_density(cs, 64, k, d);
  double bc = 0.0;
  for (std::size_t c = 0; c < cs.size(); ++c)
    for (int q = 0; q <= 20; ++q) {
      const double t = 0.12 + (pi - 0.24) * q / 20.0;
      const cplx tr = boundary_trace(cs, sol.grids, sol.psi, k, c, t);
      const cplx ui = incident_field(k, d, eval_crack(cs.cracks[c], std::cos(t)));
      bc = std::max(bc, std::abs(tr + ui));
    }

  double wr = 0.0;
  for (int i = 0; i <= 180; ++i) {
    const double x = std::pow(10.0, -6.0 + 9.0 * i / 180.0);
    const double w = bessel_j1(x) * bessel_y0(x) - bessel_j0(x) * bessel_y1(x);
    wr = std::max(wr, std::abs(w * pi * x / 2.0 - 1.0));
  }

  const int n = 64;
  const double t = 0.37;
  const auto R = log_weights(n, t);
  double lq = 0.0;
  for (int m = 0; m < n; ++m) {
    double sum = 0.0;
    for (int j = 0; j < 2 * n; ++j) {
      const double tau = (2 * j + 1) * pi / (2.0 * n);
      sum += R[j] * std::cos(m * tau);
    }
    const double exact = m == 0 ? 0.0 : -(2.0 * pi / m) * std::cos(m * t);
    lq = std::max(lq, std::abs(sum - exact));
  }

  std::ostringstream os;
  os << "reciprocity " << fmt(recip) << " (allowed 1e-6); 64->128 far-field change " << fmt(conv)
     << " (allowed 1e-6); boundary residual " << fmt(bc) << " (allowed 1e-4); Wronskian "
     << fmt(wr) << " (allowed 1e-10); log-rule exactness " << fmt(lq) << " (allowed 1e-12)";
  msg = os.str();
  return recip <= 1e-6 && conv <= 1e-6 && bc <= 1e-4 && wr <= 1e-10 && lq <= 1e-12;
}

// ---------------------------------------------------------------- criterion 7
bool criterion7(const fs::path& configs, std::string& msg) {
  RunConfig rc = load_config((configs / "dsm_three.json").string());
  const CrackSet cs{rc.cracks_truth, rc.newton.d_min};
  StageData sd = stage_from(rc, 0, rc.seed);

  const IndicatorGrid grid = dsm_indicator(sd.sets[0], rc.dsm.xmin, rc.dsm.xmax, rc.dsm.ymin,
                                           rc.dsm.ymax, rc.dsm.spacing);
  const GridMax gm = indicator_max(grid);
  const double dmax = dist_to_crack_set(cs, {gm.x, gm.y});

  const ExtractionResult ex = extract_initial_cracks(grid, rc.dsm.n_cracks);
  bool seeded = static_cast<int>(ex.cracks.size()) == rc.dsm.n_cracks && !ex.shortage;
  double J_r = 1e300;
  int p_final = 0;
  std::string note;
  if (seeded) {
    const ReconstructionState st = run_multi_freq(ex.cracks, {sd}, rc.newton);
    J_r = st.J_r;
    p_final = st.p;
    note = st.note;
  }
  std::ostringstream os;
  os << "indicator maximizer within " << fmt(dmax) << " of the crack set (allowed 0.2); "
     << ex.components_found << " components found; seeded run J_r " << fmt(J_r)
     << " (allowed 0.05) at order " << p_final << (note.empty() ? "" : ("; note: " + note));
  msg = os.str();
  return dmax <= 0.2 && seeded && J_r <= 0.05;
}

// ---------------------------------------------------------------- criterion 8
bool criterion8(const std::string& cli, const fs::path& configs, std::string& msg) {
  const fs::path root = fs::temp_directory_path() / ("arcscat_acc_" + std::to_string(::getpid()));
  fs::create_directories(root);
  const fs::path log = root / "cli.log";
  const std::string cfg = (configs / "three_cracks_noise.json").string();

  std::vector<std::string> problems;
  for (const char* sub : {"a", "b"}) {
    const std::string out = (root / sub).string();
    if (run_cli(cli, "synth --config \"" + cfg + "\" --out \"" + out + "\"", log) != 0)
      problems.push_back(std::string("synth into ") + sub + " failed");
    // Exit 2 (completed, final-stage target missed) still writes full artifacts
    // and is a legitimate outcome for a noisy run; determinism is judged on bytes.
    const int rc_inv = run_cli(cli, "invert --config \"" + cfg + "\" --out \"" + out + "\"", log);
    if (rc_inv != 0 && rc_inv != 2)
      problems.push_back(std::string("invert into ") + sub + " failed");
  }
  const char* names[] = {"farfield_f0_d0.csv", "manifest.json", "reconstruction.json",
                         "iterations.csv", "reconstruction_curves.csv"};
  if (problems.empty())
    for (const char* nm : names) {
      const std::string a = slurp(root / "a" / nm), b = slurp(root / "b" / nm);
      if (a.empty() || a != b) problems.push_back(std::string(nm) + " differs between runs");
    }

  const fs::path bad = root / "bad.json";
  std::ofstream(bad) << "{\"cracks_truth\": 7}\n";
  const int rc_bad =
      run_cli(cli, "synth --config \"" + bad.string() + "\" --out \"" + (root / "c").string() +
                       "\"",
              log);
  if (rc_bad != 1) problems.push_back("invalid config exited " + std::to_string(rc_bad));

  const fs::path miss = root / "miss.json";
  std::ofstream(miss) << R"({
  "cracks_truth": [{"type": "cheb", "d0": 0.0, "d1": 1.0, "c": [0.3]}],
  "cracks_init": [{"type": "cheb", "d0": 0.0, "d1": 1.0, "c": [0.0]}],
  "frequencies": [{"k": 2.0, "eps_target": 1e-12}],
  "incident_dirs": [[1.0, 0.0]],
  "n_obs": 32, "n_nodes": 32, "delta": 0.05, "seed": 4,
  "newton": {"p0": 1, "m_p": 1}
}
)";
  const std::string outm = (root / "m").string();
  if (run_cli(cli, "synth --config \"" + miss.string() + "\" --out \"" + outm + "\"", log) != 0)
    problems.push_back("synth for the unreachable-target config failed");
  const int rc_miss =
      run_cli(cli, "invert --config \"" + miss.string() + "\" --out \"" + outm + "\"", log);
  if (rc_miss != 2) problems.push_back("unreachable target exited " + std::to_string(rc_miss));

  std::ostringstream os;
  if (problems.empty()) {
    os << "repeated synth+invert byte-identical across " << (sizeof(names) / sizeof(*names))
       << " artifacts; invalid config exits 1; unreachable target exits 2";
  } else {
    for (std::size_t i = 0; i < problems.size(); ++i) os << (i ? "; " : "") << problems[i];
    os << " (details in " << log.string() << ")";
  }
  msg = os.str();
  return problems.empty();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <cli-binary> <configs-dir>\n";
    return 99;
  }
  const std::string cli = argv[1];
  const fs::path configs = argv[2];
  Gate gate;

  const auto guard = [&](int id, const std::function<bool(std::string&)>& f) {
    std::string msg;
    bool ok = false;
    try {
      ok = f(msg);
    } catch (const std::exception& e) {
      msg = std::string("exception: ") + e.what();
    }
    gate.report(id, ok, msg);
  };

  guard(1, [&](std::string& m) { return criterion1(configs, m); });
  guard(2, [&](std::string& m) { return criterion2(configs, m); });
  guard(3, [&](std::string& m) { return criterion3(configs, m); });
  guard(4, [&](std::string& m) { return criterion4(configs, m); });
  guard(5, [&](std::string& m) { return criterion5(configs, m); });
  guard(6, [&](std::string& m) { return criterion6(configs, m); });
  guard(7, [&](std::string& m) { return criterion7(configs, m); });
  guard(8, [&](std::string& m) { return criterion8(cli, configs, m); });

  if (gate.failures == 0)
    std::cout << "ALL CRITERIA PASSED\n";
  else
    std::cout << "FAILED CRITERIA: " << gate.failures << "\n";
  return gate.failures;
}
