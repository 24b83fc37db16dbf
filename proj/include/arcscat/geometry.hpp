#pragma once

// Open-arc geometry. Cracks are regular parametrized arcs z(s), s in [-1,1]:
//   TrigCrack: x = ax0 + ax1 s, y = sum coef * kind(m * (pi/2) * s)
//   ChebCrack: x = d0 + d1 s,   y = sum c_i T_i(s)
// Grids use the cosine substitution s_j = cos t_j, t_j = (2j-1)pi/(2n), with
// arc weight m_j = |z'(s_j)| sin t_j.

#include <algorithm>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "chebyshev.hpp"
#include "core.hpp"

namespace arcscat {

struct CurveJet {
  Vec2 p, d, dd;  // point, dz/ds, d2z/ds2
};

struct TrigTerm {
  bool is_sin = false;  // cos otherwise
  int m = 0;            // half-multiple index: argument m*(pi/2)*s; m = 0 -> constant
  double coef = 0.0;
};

struct TrigCrack {
  double ax0 = 0.0, ax1 = 1.0;
  std::vector<TrigTerm> terms;

  CurveJet jet(double s) const {
    double y = 0.0, dy = 0.0, ddy = 0.0;
    for (const auto& tm : terms) {
      double w = tm.m * (pi / 2.0);
      double a = w * s;
      double cv = std::cos(a), sv = std::sin(a);
      if (tm.is_sin) {
        y += tm.coef * sv;
        dy += tm.coef * w * cv;
        ddy -= tm.coef * w * w * sv;
      } else {
        y += tm.coef * cv;
        dy -= tm.coef * w * sv;
        ddy -= tm.coef * w * w * cv;
      }
    }
    return {{ax0 + ax1 * s, y}, {ax1, dy}, {0.0, ddy}};
  }
};

struct ChebCrack {
  double d0 = 0.0, d1 = 1.0;
  std::vector<double> c;  // Chebyshev coefficients of y(s)

  CurveJet jet(double s) const {
    ChebVal y = cheb_series(c, s);
    return {{d0 + d1 * s, y.v}, {d1, y.d}, {0.0, y.dd}};
  }
  int degree() const { return c.empty() ? 0 : static_cast<int>(c.size()) - 1; }
};

using Crack = std::variant<TrigCrack, ChebCrack>;

inline CurveJet crack_jet(const Crack& cr, double s) {
  if (s < -1.0 || s > 1.0) throw std::domain_error("crack parameter outside [-1,1]");
  return std::visit([s](const auto& c) { return c.jet(s); }, cr);
}

inline Vec2 eval_crack(const Crack& cr, double s) { return crack_jet(cr, s).p; }

// Unit tangent and the left normal (tangent rotated by +pi/2).
inline std::pair<Vec2, Vec2> eval_tangent_normal(const Crack& cr, double s) {
  CurveJet j = crack_jet(cr, s);
  double sp = j.d.norm();
  if (sp < 1e-12) throw std::domain_error("degenerate tangent: |z'(s)| < 1e-12");
  Vec2 tg{j.d.x / sp, j.d.y / sp};
  return {tg, Vec2{-tg.y, tg.x}};
}

struct CrackSet {
  std::vector<Crack> cracks;
  double d_min = 0.05;  // required pairwise separation
  std::size_t size() const { return cracks.size(); }
};

struct NystromGrid {
  int n = 0;
  std::vector<double> t, s, sint;  // t_j, cos t_j, sin t_j
  std::vector<Vec2> z, dz;         // z(s_j), z'(s_j)
  std::vector<double> speed;       // |z'(s_j)|
  std::vector<double> arcw;        // m_j = speed_j * sin t_j
};

inline NystromGrid build_grid(const Crack& cr, int n) {
  if (n < 2) throw std::invalid_argument("build_grid: n must be >= 2");
  NystromGrid g;
  g.n = n;
  g.t.resize(n); g.s.resize(n); g.sint.resize(n);
  g.z.resize(n); g.dz.resize(n); g.speed.resize(n); g.arcw.resize(n);
  for (int j = 0; j < n; ++j) {
    double t = (2.0 * j + 1.0) * pi / (2.0 * n);
    g.t[j] = t;
    g.s[j] = std::cos(t);
    g.sint[j] = std::sin(t);
    CurveJet cj = crack_jet(cr, g.s[j]);
    g.z[j] = cj.p;
    g.dz[j] = cj.d;
    g.speed[j] = cj.d.norm();
    if (g.speed[j] < 1e-12) throw std::domain_error("build_grid: degenerate curve node");
    g.arcw[j] = g.speed[j] * g.sint[j];
  }
  return g;
}

inline std::vector<NystromGrid> build_grids(const CrackSet& cs, int n) {
  std::vector<NystromGrid> gs;
  gs.reserve(cs.size());
  for (const auto& c : cs.cracks) gs.push_back(build_grid(c, n));
  return gs;
}

// Nodewise displacement samples of a perturbation field h on one crack.
struct PerturbSamples {
  std::vector<Vec2> h;   // h(s_j)
  std::vector<Vec2> dh;  // h'(s_j), derivative in s
};

inline NystromGrid perturb_grid(const NystromGrid& g, const PerturbSamples& ps, double eps) {
  NystromGrid out = g;
  for (int j = 0; j < g.n; ++j) {
    out.z[j] = g.z[j] + eps * ps.h[j];
    out.dz[j] = g.dz[j] + eps * ps.dh[j];
    out.speed[j] = out.dz[j].norm();
    if (out.speed[j] < 1e-12) throw std::domain_error("perturb_grid: degenerate curve node");
    out.arcw[j] = out.speed[j] * out.sint[j];
  }
  return out;
}

// (pi/n) sum_j m_j over all cracks: spectrally convergent arc length.
inline double total_length(const std::vector<NystromGrid>& grids) {
  double L = 0.0;
  for (const auto& g : grids) {
    double a = 0.0;
    for (double w : g.arcw) a += w;
    L += a * pi / g.n;
  }
  return L;
}

inline double total_length(const CrackSet& cs, int n) { return total_length(build_grids(cs, n)); }

inline std::vector<Vec2> polyline(const Crack& cr, int m) {
  std::vector<Vec2> pts(m);
  for (int i = 0; i < m; ++i) {
    double s = -1.0 + 2.0 * i / (m - 1.0);
    pts[i] = eval_crack(cr, s);
  }
  return pts;
}

struct ValidityReport {
  bool ok = true;
  double min_pairwise = 1e300;  // over distinct crack pairs
  double min_speed = 1e300;
  std::vector<std::string> problems;
};

inline ValidityReport validity_check(const CrackSet& cs, int samples = 512) {
  ValidityReport rep;
  std::vector<std::vector<Vec2>> polys;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const Crack& cr = cs.cracks[i];
    polys.push_back(polyline(cr, samples));
    for (int j = 0; j < samples; ++j) {
      double s = (2.0 * j / (samples - 1.0) - 1.0) * (1.0 - 1e-6);
      double sp = crack_jet(cr, s).d.norm();
      rep.min_speed = std::min(rep.min_speed, sp);
    }
    if (const auto* ch = std::get_if<ChebCrack>(&cr)) {
      if (std::fabs(ch->d1) < 1e-9) {
        rep.ok = false;
        rep.problems.push_back("crack " + std::to_string(i) + ": horizontal scale d1 ~ 0");
      }
    }
  }
  if (rep.min_speed < 1e-9) {
    rep.ok = false;
    rep.problems.push_back("curve speed |z'| below tolerance");
  }
  for (std::size_t i = 0; i < cs.size(); ++i)
    for (std::size_t j = i + 1; j < cs.size(); ++j) {
      double dmin = 1e300;
      for (const Vec2& a : polys[i])
        for (const Vec2& b : polys[j]) dmin = std::min(dmin, (a - b).norm());
      rep.min_pairwise = std::min(rep.min_pairwise, dmin);
      if (dmin < cs.d_min) {
        rep.ok = false;
        rep.problems.push_back("cracks " + std::to_string(i) + "," + std::to_string(j) +
                               " closer than d_min");
      }
    }
  return rep;
}

}  // namespace arcscat
