#pragma once

// Direct scattering by sound-soft open arcs: single-layer ansatz in the
// weighted density space, cosine substitution s = cos t, and the split
//
//   (1/2) Phi_k(z(cos t), z(cos tau)) = A(t,tau) [L- + L+] + B(t,tau),
//   L-+ = ln(4 sin^2((t -+ tau)/2)),   A = -(1/8pi) J0(k r),
//   B   = (1/2) G(k r) - (1/4pi) J0(k r) [ln k + (1/2) ln(Q/4)],
//   Q   = r^2 / (cos t - cos tau)^2,
//
// integrated with the lattice log-weights; smooth parts with the (pi/n)
// rectangle rule. Both logarithmic factors fold onto the same extended node
// set, and the folded self matrix reduces to twice the first-half entries.

#include <cstdint>
#include <memory>
#include <vector>

#include "geometry.hpp"
#include "linalg.hpp"
#include "logquad.hpp"
#include "special.hpp"

namespace arcscat {

// Phi_k; k = 0 is the Laplace kernel -ln(r)/2pi.
inline cplx fundamental(double k, double r) {
  if (k == 0.0) return {-std::log(r) / (2.0 * pi), 0.0};
  return cplx{0.0, 0.25} * hankel0(k * r);
}

// grad_x Phi_k(x,y) = grad_coef(k,r) * (x - y)
inline cplx grad_coef(double k, double r) {
  if (k == 0.0) return {-1.0 / (2.0 * pi * r * r), 0.0};
  return cplx{0.0, -0.25 * k} * hankel1(k * r) / r;
}

inline cplx incident_field(double k, const Vec2& d, const Vec2& x) {
  return std::exp(cplx{0.0, k * x.dot(d)});
}

inline Vec2 observation_direction(int count, int j1) {  // j1 = 1..count
  double a = j1 * 2.0 * pi / count;
  return {std::cos(a), std::sin(a)};
}

inline std::vector<Vec2> observation_directions(int count = 32) {
  std::vector<Vec2> d(count);
  for (int j = 0; j < count; ++j) d[j] = observation_direction(count, j + 1);
  return d;
}

namespace detail {

inline int wrap(int v, int period) {
  int r = v % period;
  return r < 0 ? r + period : r;
}

// Off-diagonal B of the self kernel.
inline cplx self_B(double k, double r, double ds) {
  double Q4 = r * r / (ds * ds) * 0.25;  // Q/4
  if (k == 0.0) return {-std::log(Q4) / (8.0 * pi), 0.0};
  double j0 = bessel_j0(k * r);
  return 0.5 * kernel_G(k * r) - cplx{j0 * (std::log(k) + 0.5 * std::log(Q4)) / (4.0 * pi), 0.0};
}

// Diagonal limit of B (also holds at the mirror node).
inline cplx self_B_diag(double k, double speed) {
  if (k == 0.0) return {-std::log(0.5 * speed) / (4.0 * pi), 0.0};
  return 0.5 * C_limit - cplx{std::log(0.5 * k * speed) / (4.0 * pi), 0.0};
}

}  // namespace detail

// Folded n x n self-interaction matrix of one crack; k = 0 gives the Laplace
// single-layer system used by the low-frequency module.
inline MatC assemble_selfblock(const NystromGrid& g, double k) {
  const int n = g.n;
  const std::vector<double> R = log_weight_table(n);
  const double wB = 2.0 * pi / n;
  MatC S(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double rs = R[detail::wrap(i - j, 2 * n)] + R[detail::wrap(i + j + 1, 2 * n)];
      if (i == j) {
        S(i, j) = 2.0 * (-1.0 / (8.0 * pi)) * rs + wB * detail::self_B_diag(k, g.speed[i]);
      } else {
        double r = (g.z[i] - g.z[j]).norm();
        double A = (k == 0.0) ? -1.0 / (8.0 * pi) : -bessel_j0(k * r) / (8.0 * pi);
        S(i, j) = 2.0 * A * rs + wB * detail::self_B(k, r, g.s[i] - g.s[j]);
      }
    }
  }
  return S;
}

// Smooth cross-interaction block: rows collocate on gi, sources on gj.
inline MatC assemble_crossblock(const NystromGrid& gi, const NystromGrid& gj, double k) {
  MatC S(gi.n, gj.n);
  double w = pi / gj.n;
  for (int i = 0; i < gi.n; ++i)
    for (int j = 0; j < gj.n; ++j) S(i, j) = w * fundamental(k, (gi.z[i] - gj.z[j]).norm());
  return S;
}

inline MatC assemble_system(const std::vector<NystromGrid>& grids, double k) {
  int N = 0;
  for (const auto& g : grids) N += g.n;
  MatC S(N, N);
  int ro = 0;
  for (std::size_t a = 0; a < grids.size(); ++a) {
    int co = 0;
    for (std::size_t b = 0; b < grids.size(); ++b) {
      S.block(ro, co, grids[a].n, grids[b].n) =
          (a == b) ? assemble_selfblock(grids[a], k) : assemble_crossblock(grids[a], grids[b], k);
      co += grids[b].n;
    }
    ro += grids[a].n;
  }
  return S;
}

struct DensitySolution {
  double k = 0.0;
  Vec2 d;
  std::vector<NystromGrid> grids;
  std::vector<VecC> psi;  // per crack
  std::shared_ptr<const CpxLU> lu;

  int total_nodes() const {
    int N = 0;
    for (const auto& g : grids) N += g.n;
    return N;
  }
  VecC stacked_psi() const {
    VecC v(total_nodes());
    int o = 0;
    for (const auto& p : psi) { v.segment(o, p.size()) = p; o += static_cast<int>(p.size()); }
    return v;
  }
};

inline std::vector<DensitySolution> solve_density(const std::vector<NystromGrid>& grids, double k,
                                                  const std::vector<Vec2>& incident_dirs) {
  auto lu = std::make_shared<const CpxLU>(assemble_system(grids, k));
  std::vector<DensitySolution> out;
  out.reserve(incident_dirs.size());
  for (const Vec2& d : incident_dirs) {
    int N = 0;
    for (const auto& g : grids) N += g.n;
    VecC rhs(N);
    int o = 0;
    for (const auto& g : grids)
      for (int j = 0; j < g.n; ++j) rhs[o++] = -incident_field(k, d, g.z[j]);
    VecC x = lu->solve(rhs);
    DensitySolution sol;
    sol.k = k;
    sol.d = d;
    sol.grids = grids;
    sol.lu = lu;
    o = 0;
    for (const auto& g : grids) {
      sol.psi.emplace_back(x.segment(o, g.n));
      o += g.n;
    }
    out.push_back(std::move(sol));
  }
  return out;
}

inline DensitySolution solve_density(const CrackSet& cs, int n, double k, const Vec2& d) {
  return solve_density(build_grids(cs, n), k, {d})[0];
}

struct FarFieldSet {
  double k = 0.0;
  Vec2 d;
  std::vector<Vec2> dirs;
  std::vector<cplx> values;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

inline cplx farfield_prefactor(double k) {
  return std::exp(cplx{0.0, pi / 4.0}) / std::sqrt(8.0 * pi * k);
}

// Far-field functional of an arbitrary stacked density (same grids).
inline cplx farfield_of_density(const std::vector<NystromGrid>& grids,
                                const std::vector<VecC>& psi, double k, const Vec2& xhat) {
  cplx acc = 0.0;
  for (std::size_t c = 0; c < grids.size(); ++c) {
    const auto& g = grids[c];
    cplx s = 0.0;
    for (int j = 0; j < g.n; ++j)
      s += std::exp(cplx{0.0, -k * xhat.dot(g.z[j])}) * psi[c][j];
    acc += s * (pi / g.n);
  }
  return farfield_prefactor(k) * acc;
}

inline FarFieldSet far_field(const DensitySolution& sol, const std::vector<Vec2>& dirs) {
  FarFieldSet ff;
  ff.k = sol.k;
  ff.d = sol.d;
  ff.dirs = dirs;
  ff.values.reserve(dirs.size());
  for (const Vec2& xh : dirs) ff.values.push_back(farfield_of_density(sol.grids, sol.psi, sol.k, xh));
  return ff;
}

struct FieldEval {
  std::vector<cplx> values;     // scattered field
  std::vector<bool> near_flag;  // true when the accuracy guard distance was violated
};

// Scattered field by the plain rectangle rule; points closer than
// 10*(pi/n)*max arc weight to a crack are flagged.
inline FieldEval field_at(const DensitySolution& sol, const std::vector<Vec2>& pts) {
  FieldEval out;
  out.values.reserve(pts.size());
  out.near_flag.reserve(pts.size());
  for (const Vec2& x : pts) {
    cplx acc = 0.0;
    bool near = false;
    for (std::size_t c = 0; c < sol.grids.size(); ++c) {
      const auto& g = sol.grids[c];
      double wmax = 0.0, dmin = 1e300;
      for (double w : g.arcw) wmax = std::max(wmax, w);
      cplx s = 0.0;
      for (int j = 0; j < g.n; ++j) {
        double r = (x - g.z[j]).norm();
        dmin = std::min(dmin, r);
        s += fundamental(sol.k, r) * sol.psi[c][j];
      }
      acc += s * (pi / g.n);
      if (dmin < 10.0 * (pi / g.n) * wmax) near = true;
    }
    out.values.push_back(acc);
    out.near_flag.push_back(near);
  }
  return out;
}

// Interpolating cosine coefficients of an even 2pi-periodic density given on
// the shifted grid: p(tau) = c0 + sum_{m=1}^{n-1} c_m cos(m tau).
inline std::vector<cplx> density_cos_coeffs(const VecC& psi) {
  const int n = static_cast<int>(psi.size());
  std::vector<cplx> c(n);
  for (int m = 0; m < n; ++m) {
    cplx a = 0.0;
    for (int j = 0; j < n; ++j) a += psi[j] * std::cos(m * (2.0 * j + 1.0) * pi / (2.0 * n));
    c[m] = a * ((m == 0 ? 1.0 : 2.0) / n);
  }
  return c;
}

inline cplx density_cos_eval(const std::vector<cplx>& c, double tau) {
  cplx v = c[0];
  for (std::size_t m = 1; m < c.size(); ++m) v += c[m] * std::cos(m * tau);
  return v;
}

// Single-layer potential of one crack's density at a near point, rectangle
// rule on a trigonometrically upsampled grid (M nodes).
inline cplx single_layer_upsampled(const Crack& cr, const VecC& psi, double k, const Vec2& x,
                                   int M) {
  std::vector<cplx> coef = density_cos_coeffs(psi);
  cplx acc = 0.0;
  for (int i = 0; i < M; ++i) {
    double t = (2.0 * i + 1.0) * pi / (2.0 * M);
    Vec2 y = eval_crack(cr, std::cos(t));
    acc += fundamental(k, (x - y).norm()) * density_cos_eval(coef, t);
  }
  return acc * (pi / M);
}

// (S_k psi)(t) on crack ci at arbitrary parameter t in (0,pi): the same
// split-quadrature row used for assembly, plus smooth contributions of the
// other cracks. Used for off-node boundary-condition checks.
inline cplx boundary_trace(const CrackSet& cs, const std::vector<NystromGrid>& grids,
                           const std::vector<VecC>& psi, double k, std::size_t ci, double t) {
  const NystromGrid& g = grids[ci];
  const int n = g.n;
  CurveJet cj = crack_jet(cs.cracks[ci], std::cos(t));
  const Vec2 x = cj.p;
  std::vector<double> Rm = log_weights(n, t);
  std::vector<double> Rp = log_weights(n, 2.0 * pi - t);
  cplx acc = 0.0;
  for (int j = 0; j < n; ++j) {
    double ds = std::cos(t) - g.s[j];
    cplx ent;
    if (std::fabs(ds) < 1e-12) {
      double A0 = -1.0 / (8.0 * pi);
      ent = 2.0 * A0 * (Rm[j] + Rp[j]) + (2.0 * pi / n) * detail::self_B_diag(k, cj.d.norm());
    } else {
      double r = (x - g.z[j]).norm();
      double A = (k == 0.0) ? -1.0 / (8.0 * pi) : -bessel_j0(k * r) / (8.0 * pi);
      ent = 2.0 * A * (Rm[j] + Rp[j]) + (2.0 * pi / n) * detail::self_B(k, r, ds);
    }
    acc += ent * psi[ci][j];
  }
  for (std::size_t c = 0; c < grids.size(); ++c) {
    if (c == ci) continue;
    const auto& gc = grids[c];
    cplx s = 0.0;
    for (int j = 0; j < gc.n; ++j) s += fundamental(k, (x - gc.z[j]).norm()) * psi[c][j];
    acc += s * (pi / gc.n);
  }
  return acc;
}

// F_delta = F + delta * ||F|| * R / ||R||, R a seeded complex normal vector;
// the realized relative error equals delta to machine precision.
inline FarFieldSet add_noise(const FarFieldSet& ff, double delta, std::uint64_t seed) {
  FarFieldSet out = ff;
  out.delta = delta;
  out.seed = seed;
  if (delta == 0.0) return out;
  NormalStream ns(seed);
  std::vector<cplx> R(ff.values.size());
  double rn = 0.0, fn = 0.0;
  for (auto& r : R) {
    double re = ns.next(), im = ns.next();
    r = {re, im};
    rn += re * re + im * im;
  }
  for (const auto& v : ff.values) fn += std::norm(v);
  double scale = delta * std::sqrt(fn / rn);
  for (std::size_t i = 0; i < R.size(); ++i) out.values[i] += scale * R[i];
  return out;
}

}  // namespace arcscat
