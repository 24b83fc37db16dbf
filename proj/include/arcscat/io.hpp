#pragma once

// Configuration parsing and deterministic artifact serialization. All floats
// are written with 17 significant digits so values round-trip losslessly and
// repeated runs produce byte-identical files. Every output starts with a
// comment header carrying the artifact version and the config hash.

#include <cstdio>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "geometry.hpp"
#include "forward.hpp"
#include "inversion.hpp"
#include "lowfreq.hpp"
#include "sampling.hpp"

namespace arcscat {

inline constexpr const char* artifact_version = "arcscat 1.0.0";

inline std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline void write_header(std::ostream& os, std::uint64_t config_hash) {
  os << "# " << artifact_version << "\n";
  os << "# config_hash " << hash_hex(config_hash) << "\n";
}

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(trim(tok));
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------- far field

inline void write_farfield_csv(const std::string& path, const FarFieldSet& ff,
                               std::uint64_t config_hash) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  detail::write_header(os, config_hash);
  os << "k, d_x, d_y, xhat_x, xhat_y, re, im, delta, seed\n";
  for (std::size_t j = 0; j < ff.values.size(); ++j) {
    os << fmt17(ff.k) << ", " << fmt17(ff.d.x) << ", " << fmt17(ff.d.y) << ", "
       << fmt17(ff.dirs[j].x) << ", " << fmt17(ff.dirs[j].y) << ", "
       << fmt17(ff.values[j].real()) << ", " << fmt17(ff.values[j].imag()) << ", "
       << fmt17(ff.delta) << ", " << ff.seed << "\n";
  }
}

inline FarFieldSet read_farfield_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  FarFieldSet ff;
  std::string line;
  bool saw_header = false, saw_row = false;
  while (std::getline(is, line)) {
    std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!saw_header) {
      auto cols = detail::split_csv(t);
      if (cols.size() != 9 || cols[0] != "k" || cols[5] != "re" || cols[8] != "seed")
        throw std::runtime_error("far-field CSV schema mismatch in " + path);
      saw_header = true;
      continue;
    }
    auto f = detail::split_csv(t);
    if (f.size() != 9) throw std::runtime_error("far-field CSV bad row in " + path);
    double k = std::stod(f[0]);
    Vec2 d{std::stod(f[1]), std::stod(f[2])};
    if (!saw_row) {
      ff.k = k;
      ff.d = d;
      ff.delta = std::stod(f[7]);
      ff.seed = std::stoull(f[8]);
      saw_row = true;
    }
    ff.dirs.push_back({std::stod(f[3]), std::stod(f[4])});
    ff.values.emplace_back(std::stod(f[5]), std::stod(f[6]));
  }
  if (!saw_row) throw std::runtime_error("far-field CSV has no data rows: " + path);
  return ff;
}

// ------------------------------------------------------------ iteration log

inline void write_iteration_log(const std::string& path,
                                const std::vector<IterationRecord>& hist,
                                std::uint64_t config_hash) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  detail::write_header(os, config_hash);
  os << "stage_k, p, iter, J_r, step_norm, damped_flag\n";
  for (const auto& r : hist)
    os << fmt17(r.stage_k) << ", " << r.p << ", " << r.iter << ", " << fmt17(r.J_r) << ", "
       << fmt17(r.step_norm) << ", " << (r.damped ? 1 : 0) << "\n";
}

// ------------------------------------------------------- reconstruction JSON

inline nlohmann::json crack_to_json(const ChebCrack& c) {
  nlohmann::json j;
  j["type"] = "cheb";
  j["d0"] = c.d0;
  j["d1"] = c.d1;
  j["c"] = c.c;
  return j;
}

inline void write_reconstruction_json(const std::string& path, const ReconstructionState& st,
                                      std::uint64_t config_hash) {
  nlohmann::json j;
  j["version"] = artifact_version;
  j["config_hash"] = hash_hex(config_hash);
  j["J_r"] = st.J_r;
  j["final_p"] = st.p;
  j["target_missed"] = st.target_missed;
  if (!st.note.empty()) j["note"] = st.note;
  j["cracks"] = nlohmann::json::array();
  for (const auto& c : st.cracks) j["cracks"].push_back(crack_to_json(c));
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << j.dump(2) << "\n";
}

// 201 samples per crack, s uniform in [-0.999, 0.999]; blocks separated by a
// blank line so gnuplot draws one curve per crack.
inline void write_polyline_csv(const std::string& path, const std::vector<ChebCrack>& cracks,
                               std::uint64_t config_hash) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  detail::write_header(os, config_hash);
  os << "# columns: s, x, y\n";
  for (std::size_t i = 0; i < cracks.size(); ++i) {
    os << "# crack " << i << "\n";
    for (int j = 0; j < 201; ++j) {
      double s = -0.999 + j * (2.0 * 0.999 / 200.0);
      CurveJet cj = cracks[i].jet(s);
      os << fmt17(s) << ", " << fmt17(cj.p.x) << ", " << fmt17(cj.p.y) << "\n";
    }
    if (i + 1 < cracks.size()) os << "\n";
  }
}

// ----------------------------------------------------------- indicator grid

inline void write_indicator_csv(const std::string& path, const IndicatorGrid& g,
                                std::uint64_t config_hash) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  detail::write_header(os, config_hash);
  os << "# columns: x, y, I\n";
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix)
      os << fmt17(g.x_of(ix)) << ", " << fmt17(g.y_of(iy)) << ", " << fmt17(g.at(ix, iy))
         << "\n";
    if (iy + 1 < g.ny) os << "\n";  // scanline blocks for pm3d
  }
}

inline void write_heatmap_gnuplot(const std::string& path, const std::string& csv_name,
                                  const std::string& title) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "set datafile separator ','\n"
     << "set size ratio -1\n"
     << "set pm3d map\n"
     << "set title '" << title << "'\n"
     << "splot '" << csv_name << "' using 1:2:3 with pm3d notitle\n";
}

// ------------------------------------------------------------ low frequency

inline void write_asymptotic_csv(const std::string& path, const std::vector<AsymptoticRow>& rows,
                                 std::uint64_t config_hash) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  detail::write_header(os, config_hash);
  os << "# columns: k, ln_k, e_k\n";
  for (const auto& r : rows)
    os << fmt17(r.k) << ", " << fmt17(std::log(r.k)) << ", " << fmt17(r.e) << "\n";
}

// values[iy][ix] layout matching x0/y0/spacing
inline void write_scalar_grid_csv(const std::string& path, double x0, double y0, double spacing,
                                  const std::vector<std::vector<double>>& values,
                                  std::uint64_t config_hash) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  detail::write_header(os, config_hash);
  os << "# columns: x, y, v\n";
  for (std::size_t iy = 0; iy < values.size(); ++iy) {
    for (std::size_t ix = 0; ix < values[iy].size(); ++ix)
      os << fmt17(x0 + spacing * ix) << ", " << fmt17(y0 + spacing * iy) << ", "
         << fmt17(values[iy][ix]) << "\n";
    if (iy + 1 < values.size()) os << "\n";
  }
}

// ---------------------------------------------------------------- gradcheck

struct GradCheckRow {
  int basis_index = 0;
  double analytic_norm = 0.0;
  double fd_norm = 0.0;
  double rel_err = 0.0;
};

inline void write_gradcheck_csv(const std::string& path, const std::vector<GradCheckRow>& rows,
                                std::uint64_t config_hash) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  detail::write_header(os, config_hash);
  os << "basis_index, analytic_norm, fd_norm, rel_err\n";
  for (const auto& r : rows)
    os << r.basis_index << ", " << fmt17(r.analytic_norm) << ", " << fmt17(r.fd_norm) << ", "
       << fmt17(r.rel_err) << "\n";
}

// -------------------------------------------------------------- run config

struct FrequencySpec {
  double k = 3.0;
  std::optional<double> eps_target;
};

struct DsmSpec {
  double xmin = -4.0, xmax = 4.0, ymin = -4.0, ymax = 4.0;
  double spacing = 0.05;
  int n_cracks = 1;
};

struct RunConfig {
  std::vector<Crack> cracks_truth;
  std::vector<ChebCrack> cracks_init;
  std::vector<FrequencySpec> frequencies{{3.0, std::nullopt}};
  std::vector<Vec2> incident_dirs{{1.0, 0.0}};
  int n_obs = 32;
  int n_nodes = 0;  // 0 -> choose by wavenumber
  double delta = 0.0;
  std::uint64_t seed = 1;
  NewtonConfig newton;
  DsmSpec dsm;
  std::vector<double> lowfreq_ks{1e-2, 1e-4, 1e-8};
  std::vector<std::string> data_files;  // optional explicit inputs for invert
  std::uint64_t hash = 0;               // FNV-1a of the canonical effective config
};

namespace detail {

inline Crack parse_crack(const nlohmann::json& j) {
  std::string type = j.at("type").get<std::string>();
  if (type == "trig") {
    TrigCrack c;
    c.ax0 = j.at("ax0").get<double>();
    c.ax1 = j.at("ax1").get<double>();
    for (const auto& t : j.at("terms")) {
      TrigTerm tm;
      std::string fn = t.at("fn").get<std::string>();
      if (fn != "sin" && fn != "cos") throw std::runtime_error("trig term fn must be sin|cos");
      tm.is_sin = fn == "sin";
      tm.m = t.at("m").get<int>();
      if (tm.m < 0) throw std::runtime_error("trig term m must be >= 0");
      tm.coef = t.at("coef").get<double>();
      c.terms.push_back(tm);
    }
    return c;
  }
  if (type == "cheb") {
    ChebCrack c;
    c.d0 = j.at("d0").get<double>();
    c.d1 = j.at("d1").get<double>();
    c.c = j.at("c").get<std::vector<double>>();
    if (c.c.empty()) throw std::runtime_error("cheb crack needs at least one coefficient");
    return c;
  }
  throw std::runtime_error("unknown crack type: " + type);
}

inline ChebCrack parse_cheb_crack(const nlohmann::json& j) {
  Crack c = parse_crack(j);
  if (!std::holds_alternative<ChebCrack>(c))
    throw std::runtime_error("initial-guess cracks must be type cheb");
  return std::get<ChebCrack>(c);
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  RunConfig rc;
  if (j.contains("cracks_truth"))
    for (const auto& c : j.at("cracks_truth")) rc.cracks_truth.push_back(detail::parse_crack(c));
  if (j.contains("cracks_init"))
    for (const auto& c : j.at("cracks_init"))
      rc.cracks_init.push_back(detail::parse_cheb_crack(c));
  if (j.contains("frequencies")) {
    rc.frequencies.clear();
    for (const auto& f : j.at("frequencies")) {
      FrequencySpec fs;
      fs.k = f.at("k").get<double>();
      if (fs.k <= 0) throw std::runtime_error("frequency k must be > 0");
      if (f.contains("eps_target")) fs.eps_target = f.at("eps_target").get<double>();
      rc.frequencies.push_back(fs);
    }
    if (rc.frequencies.empty()) throw std::runtime_error("frequencies must not be empty");
  }
  if (j.contains("incident_dirs")) {
    rc.incident_dirs.clear();
    for (const auto& d : j.at("incident_dirs")) {
      if (!d.is_array() || d.size() != 2) throw std::runtime_error("incident dir must be [x,y]");
      rc.incident_dirs.push_back({d[0].get<double>(), d[1].get<double>()});
    }
    if (rc.incident_dirs.empty()) throw std::runtime_error("incident_dirs must not be empty");
  }
  if (j.contains("n_obs")) rc.n_obs = j.at("n_obs").get<int>();
  if (rc.n_obs < 1) throw std::runtime_error("n_obs must be >= 1");
  if (j.contains("n_nodes")) rc.n_nodes = j.at("n_nodes").get<int>();
  if (j.contains("delta")) rc.delta = j.at("delta").get<double>();
  if (rc.delta < 0) throw std::runtime_error("delta must be >= 0");
  if (j.contains("seed")) rc.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("newton")) {
    const auto& n = j.at("newton");
    auto& c = rc.newton;
    if (n.contains("p0")) c.p0 = n.at("p0").get<int>();
    if (n.contains("m_p")) c.m_p = n.at("m_p").get<int>();
    if (c.p0 < 0 || c.m_p < c.p0) throw std::runtime_error("newton orders need 0 <= p0 <= m_p");
    if (n.contains("eps_stop")) c.eps_stop = n.at("eps_stop").get<double>();
    if (n.contains("tikhonov_lambda")) c.tikhonov_lambda = n.at("tikhonov_lambda").get<double>();
    if (n.contains("max_inner")) c.max_inner = n.at("max_inner").get<int>();
    if (n.contains("step_clamp")) c.step_clamp = n.at("step_clamp").get<double>();
    if (n.contains("damping_retries")) c.damping_retries = n.at("damping_retries").get<int>();
    if (n.contains("d_min")) c.d_min = n.at("d_min").get<double>();
    if (n.contains("use_fd")) c.use_fd = n.at("use_fd").get<bool>();
    if (n.contains("fd_eps")) c.fd_eps = n.at("fd_eps").get<double>();
    if (c.eps_stop <= 0 || c.step_clamp <= 0 || c.max_inner < 1)
      throw std::runtime_error("newton thresholds must be positive");
  }
  if (j.contains("dsm")) {
    const auto& d = j.at("dsm");
    if (d.contains("xmin")) rc.dsm.xmin = d.at("xmin").get<double>();
    if (d.contains("xmax")) rc.dsm.xmax = d.at("xmax").get<double>();
    if (d.contains("ymin")) rc.dsm.ymin = d.at("ymin").get<double>();
    if (d.contains("ymax")) rc.dsm.ymax = d.at("ymax").get<double>();
    if (d.contains("spacing")) rc.dsm.spacing = d.at("spacing").get<double>();
    if (d.contains("n_cracks")) rc.dsm.n_cracks = d.at("n_cracks").get<int>();
    if (rc.dsm.spacing <= 0) throw std::runtime_error("dsm spacing must be > 0");
    if (rc.dsm.n_cracks < 1) throw std::runtime_error("dsm n_cracks must be >= 1");
  }
  if (j.contains("lowfreq_ks")) {
    rc.lowfreq_ks = j.at("lowfreq_ks").get<std::vector<double>>();
    for (double k : rc.lowfreq_ks)
      if (!(k > 0 && k < 1)) throw std::runtime_error("lowfreq_ks entries must be in (0,1)");
  }
  if (j.contains("data_files"))
    rc.data_files = j.at("data_files").get<std::vector<std::string>>();
  return rc;
}

// Loads a config file; an optional seed override is merged before hashing so
// the hash identifies the effective run.
inline RunConfig load_config(const std::string& path,
                             std::optional<std::uint64_t> seed_override = std::nullopt) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  nlohmann::json j = nlohmann::json::parse(is);
  if (seed_override) j["seed"] = *seed_override;
  RunConfig rc = parse_config(j);
  rc.hash = fnv1a64(j.dump());
  return rc;
}

// Conventional per-run data file name (frequency index, direction index).
inline std::string farfield_file_name(std::size_t fi, std::size_t di) {
  return "farfield_f" + std::to_string(fi) + "_d" + std::to_string(di) + ".csv";
}

inline void write_manifest(const std::string& path, const RunConfig& rc,
                           const std::vector<nlohmann::json>& files) {
  nlohmann::json j;
  j["version"] = artifact_version;
  j["config_hash"] = hash_hex(rc.hash);
  j["delta"] = rc.delta;
  j["seed"] = rc.seed;
  j["files"] = files;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << j.dump(2) << "\n";
}

}  // namespace arcscat
