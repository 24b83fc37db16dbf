#pragma once

// Low-frequency machinery. With W phi = phi - (1/|S|) int phi and
// L phi = int phi, the operator A = S0 W + L is invertible and
//   rho = A^{-1} S0(1),
//   v(x) = (1/|S|) [ S0(W rho)(x) + L rho - S0(1)(x) ]
// vanishes on the arcs, is positive off them and grows like (1/2pi) ln|x|.
// For 0 < k < 1 the modified system S_k (W - (2pi/ln k) I) phi = -u_inc is
// uniformly solvable and u(x,k) ~ -(2pi/ln k) v(x) + O(1/ln^2 k).

#include <vector>

#include "forward.hpp"

namespace arcscat {

// Stacked per-node integration weights: l_j = pi/n_c on crack c, so
// L psi = l . psi and the constant density 1 has psi-representation m.
inline VecR length_weights(const std::vector<NystromGrid>& grids) {
  int N = 0;
  for (const auto& g : grids) N += g.n;
  VecR l(N);
  int o = 0;
  for (const auto& g : grids)
    for (int j = 0; j < g.n; ++j) l[o++] = pi / g.n;
  return l;
}

inline VecR arc_weight_vector(const std::vector<NystromGrid>& grids) {
  int N = 0;
  for (const auto& g : grids) N += g.n;
  VecR m(N);
  int o = 0;
  for (const auto& g : grids)
    for (int j = 0; j < g.n; ++j) m[o++] = g.arcw[j];
  return m;
}

inline cplx apply_L(const std::vector<NystromGrid>& grids, const VecC& psi) {
  VecR l = length_weights(grids);
  cplx acc = 0.0;
  for (int j = 0; j < l.size(); ++j) acc += l[j] * psi[j];
  return acc;
}

inline VecC apply_W(const std::vector<NystromGrid>& grids, const VecC& psi) {
  VecR l = length_weights(grids);
  VecR m = arc_weight_vector(grids);
  double len = l.dot(m);
  cplx L = apply_L(grids, psi);
  VecC out = psi;
  for (int j = 0; j < m.size(); ++j) out[j] -= (L / len) * m[j];
  return out;
}

struct LaplaceProfile {
  std::vector<NystromGrid> grids;
  double length = 0.0;  // discrete |S|
  VecC rho;             // A^{-1} S0(1)
  VecC q;               // W rho - m, the single evaluation density of v
  cplx Lrho = 0.0;
};

inline MatC laplace_A_matrix(const std::vector<NystromGrid>& grids) {
  MatC S0 = assemble_system(grids, 0.0);
  VecR l = length_weights(grids);
  VecR m = arc_weight_vector(grids);
  double len = l.dot(m);
  VecC S0m = S0 * m.cast<cplx>();
  MatC A = S0 - (S0m / len) * l.cast<cplx>().transpose();
  A += VecC::Ones(S0.rows()) * l.cast<cplx>().transpose();
  return A;
}

inline LaplaceProfile solve_profile(const CrackSet& cs, int n) {
  LaplaceProfile prof;
  prof.grids = build_grids(cs, n);
  MatC S0 = assemble_system(prof.grids, 0.0);
  VecR l = length_weights(prof.grids);
  VecR m = arc_weight_vector(prof.grids);
  prof.length = l.dot(m);
  VecC b = S0 * m.cast<cplx>();
  MatC A = S0 - (b / prof.length) * l.cast<cplx>().transpose();
  A += VecC::Ones(S0.rows()) * l.cast<cplx>().transpose();
  prof.rho = CpxLU(A).solve(b);
  prof.Lrho = apply_L(prof.grids, prof.rho);
  prof.q = apply_W(prof.grids, prof.rho) - m.cast<cplx>();
  return prof;
}

namespace detail {
inline std::vector<VecC> split_per_crack(const std::vector<NystromGrid>& grids, const VecC& v) {
  std::vector<VecC> out;
  int o = 0;
  for (const auto& g : grids) {
    out.emplace_back(v.segment(o, g.n));
    o += g.n;
  }
  return out;
}
}  // namespace detail

// v at off-arc points; near points fall back to the upsampled rule.
inline double eval_v(const LaplaceProfile& prof, const CrackSet& cs, const Vec2& x,
                     int upsample = 4096) {
  std::vector<VecC> qc = detail::split_per_crack(prof.grids, prof.q);
  cplx acc = prof.Lrho;
  for (std::size_t c = 0; c < prof.grids.size(); ++c) {
    const auto& g = prof.grids[c];
    double wmax = 0.0, dmin = 1e300;
    for (double w : g.arcw) wmax = std::max(wmax, w);
    for (int j = 0; j < g.n; ++j) dmin = std::min(dmin, (x - g.z[j]).norm());
    if (dmin < 10.0 * (pi / g.n) * wmax) {
      acc += single_layer_upsampled(cs.cracks[c], qc[c], 0.0, x, upsample);
    } else {
      cplx s = 0.0;
      for (int j = 0; j < g.n; ++j) s += fundamental(0.0, (x - g.z[j]).norm()) * qc[c][j];
      acc += s * (pi / g.n);
    }
  }
  return (acc / prof.length).real();
}

// v on crack ci at off-node parameter t, through the split-quadrature trace.
inline double eval_v_on_arc(const LaplaceProfile& prof, const CrackSet& cs, std::size_t ci,
                            double t) {
  std::vector<VecC> qc = detail::split_per_crack(prof.grids, prof.q);
  cplx tr = boundary_trace(cs, prof.grids, qc, 0.0, ci, t);
  return ((tr + prof.Lrho) / prof.length).real();
}

struct ModifiedSolution {
  double k = 0.0;
  Vec2 d;
  std::vector<NystromGrid> grids;
  std::vector<VecC> chi;  // u = u_inc + S_k(chi)
};

inline MatC modified_matrix(const std::vector<NystromGrid>& grids, double k) {
  MatC Sk = assemble_system(grids, k);
  VecR l = length_weights(grids);
  VecR m = arc_weight_vector(grids);
  double len = l.dot(m);
  VecC Skm = Sk * m.cast<cplx>();
  MatC M = (1.0 - 2.0 * pi / std::log(k)) * Sk;
  M -= (Skm / len) * l.cast<cplx>().transpose();
  return M;
}

inline ModifiedSolution modified_solve(const CrackSet& cs, int n, double k, const Vec2& d) {
  if (!(k > 0.0) || k >= 1.0) throw std::invalid_argument("modified_solve: requires 0 < k < 1");
  ModifiedSolution ms;
  ms.k = k;
  ms.d = d;
  ms.grids = build_grids(cs, n);
  MatC M = modified_matrix(ms.grids, k);
  int N = static_cast<int>(M.rows());
  VecC rhs(N);
  int o = 0;
  for (const auto& g : ms.grids)
    for (int j = 0; j < g.n; ++j) rhs[o++] = -incident_field(k, d, g.z[j]);
  VecC phi = CpxLU(M).solve(rhs);
  VecR l = length_weights(ms.grids);
  VecR m = arc_weight_vector(ms.grids);
  double len = l.dot(m);
  cplx L = 0.0;
  for (int j = 0; j < N; ++j) L += l[j] * phi[j];
  VecC chi = phi * (1.0 - 2.0 * pi / std::log(k)) - (L / len) * m.cast<cplx>();
  ms.chi = detail::split_per_crack(ms.grids, chi);
  return ms;
}

// Total field u(x,k) of the modified solve at points away from the arcs.
inline cplx modified_field_at(const ModifiedSolution& ms, const Vec2& x) {
  cplx acc = incident_field(ms.k, ms.d, x);
  for (std::size_t c = 0; c < ms.grids.size(); ++c) {
    const auto& g = ms.grids[c];
    cplx s = 0.0;
    for (int j = 0; j < g.n; ++j) s += fundamental(ms.k, (x - g.z[j]).norm()) * ms.chi[c][j];
    acc += s * (pi / g.n);
  }
  return acc;
}

struct AsymptoticRow {
  double k = 0.0;
  double e = 0.0;  // max_x | (-ln k / 2pi) u(x,k) - v(x) |
};

inline std::vector<AsymptoticRow> asymptotic_check(const CrackSet& cs, int n,
                                                   const std::vector<double>& ks,
                                                   const std::vector<Vec2>& pts,
                                                   const Vec2& d = {1.0, 0.0}) {
  LaplaceProfile prof = solve_profile(cs, n);
  std::vector<double> v(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) v[i] = eval_v(prof, cs, pts[i]);
  std::vector<AsymptoticRow> rows;
  for (double k : ks) {
    ModifiedSolution ms = modified_solve(cs, n, k, d);
    double e = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      cplx u = modified_field_at(ms, pts[i]);
      e = std::max(e, std::abs(u * (-std::log(k) / (2.0 * pi)) - cplx{v[i], 0.0}));
    }
    rows.push_back({k, e});
  }
  return rows;
}

}  // namespace arcscat
