#pragma once

// Shape derivative of the far-field map. For a displacement field h on the
// arcs, the far field of the derivative splits as v1 + v2 + v3:
//   v1: direct movement of the representation points,
//   v2: -S_k S_k^{-1} S_k' psi  (kernel movement),
//   v3:  S_k S_k^{-1} Z'(-u_inc) (boundary-trace movement),
// all reusing the forward factorization. The self-block derivative kernel
// factors as P(t,tau) * KD(t,tau) with P = (z(cos t)-z(cos tau)) . (h(cos t)
// - h(cos tau)) and KD independent of h, so one precomputed KD serves every
// Jacobian column. Diagonal limit: -(1/4pi) (z'.h')/|z'|^2 (P = O(r^2) kills
// the J1 ln k and G1 parts).

#include <optional>
#include <vector>

#include "forward.hpp"

namespace arcscat {

struct Perturbation {
  // Aligned with the crack list; an empty part means zero displacement there.
  std::vector<PerturbSamples> parts;

  bool zero_on(std::size_t c) const { return parts[c].h.empty(); }
};

inline Perturbation make_vertical_cheb(const std::vector<NystromGrid>& grids, std::size_t crack,
                                       int i) {
  Perturbation p;
  p.parts.resize(grids.size());
  const auto& g = grids[crack];
  auto& ps = p.parts[crack];
  ps.h.resize(g.n);
  ps.dh.resize(g.n);
  for (int j = 0; j < g.n; ++j) {
    ChebVal T = cheb_T(i, g.s[j]);
    ps.h[j] = {0.0, T.v};
    ps.dh[j] = {0.0, T.d};
  }
  return p;
}

inline Perturbation make_horizontal_power(const std::vector<NystromGrid>& grids, std::size_t crack,
                                          int i) {
  Perturbation p;
  p.parts.resize(grids.size());
  const auto& g = grids[crack];
  auto& ps = p.parts[crack];
  ps.h.resize(g.n);
  ps.dh.resize(g.n);
  for (int j = 0; j < g.n; ++j) {
    double s = g.s[j];
    ps.h[j] = {i == 0 ? 1.0 : s, 0.0};
    ps.dh[j] = {i == 0 ? 0.0 : 1.0, 0.0};
  }
  return p;
}

inline Perturbation make_field(const std::vector<NystromGrid>& grids, std::size_t crack,
                               const std::vector<Vec2>& h, const std::vector<Vec2>& dh) {
  Perturbation p;
  p.parts.resize(grids.size());
  p.parts[crack] = {h, dh};
  return p;
}

// Trace of h . grad f at the nodes, stacked; grad given per node as two
// complex components.
inline VecC dZ_trace(const std::vector<NystromGrid>& grids, const Perturbation& h,
                     const std::vector<std::vector<std::pair<cplx, cplx>>>& grad) {
  int N = 0;
  for (const auto& g : grids) N += g.n;
  VecC out = VecC::Zero(N);
  int o = 0;
  for (std::size_t c = 0; c < grids.size(); ++c) {
    for (int j = 0; j < grids[c].n; ++j) {
      if (!h.zero_on(c)) {
        const Vec2& hv = h.parts[c].h[j];
        out[o] = hv.x * grad[c][j].first + hv.y * grad[c][j].second;
      }
      ++o;
    }
  }
  return out;
}

// Derivative workspace for fixed geometry and wavenumber.
class DerivAssembly {
 public:
  DerivAssembly(const std::vector<NystromGrid>& grids, double k) : grids_(grids), k_(k) {
    const std::size_t nc = grids.size();
    KD_.resize(nc);
    diagfac_.resize(nc);
    for (std::size_t c = 0; c < nc; ++c) {
      const auto& g = grids[c];
      const int n = g.n;
      const std::vector<double> R = log_weight_table(n);
      KD_[c] = MatC::Zero(n, n);
      diagfac_[c].resize(n);
      for (int i = 0; i < n; ++i) {
        diagfac_[c][i] = -1.0 / (2.0 * n * g.speed[i] * g.speed[i]);
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          double r = (g.z[i] - g.z[j]).norm();
          double ds = g.s[i] - g.s[j];
          double Q4 = r * r / (ds * ds) * 0.25;
          double rs = R[detail::wrap(i - j, 2 * n)] + R[detail::wrap(i + j + 1, 2 * n)];
          double j1r = bessel_j1(k * r) / r;
          cplx kd = (k / (8.0 * pi)) * j1r * rs;
          cplx b = -(0.5 * k) * kernel_G1(k * r) / r +
                   cplx{(k / (4.0 * pi)) * j1r * (std::log(k) + 0.5 * std::log(Q4)), 0.0} -
                   cplx{1.0 / (4.0 * pi * r * r), 0.0};
          KD_[c](i, j) = 2.0 * (kd + (pi / n) * b);
        }
      }
    }
    const std::size_t np = nc;
    Gx_.resize(np * np);
    Gy_.resize(np * np);
    for (std::size_t a = 0; a < nc; ++a)
      for (std::size_t b = 0; b < nc; ++b) {
        if (a == b) continue;
        const auto& ga = grids[a];
        const auto& gb = grids[b];
        MatC gx(ga.n, gb.n), gy(ga.n, gb.n);
        double w = pi / gb.n;
        for (int i = 0; i < ga.n; ++i)
          for (int j = 0; j < gb.n; ++j) {
            Vec2 dxy = ga.z[i] - gb.z[j];
            cplx gc = grad_coef(k, dxy.norm()) * w;
            gx(i, j) = gc * dxy.x;
            gy(i, j) = gc * dxy.y;
          }
        Gx_[a * np + b] = std::move(gx);
        Gy_[a * np + b] = std::move(gy);
      }
  }

  // w = S_k'(h) applied to the stacked density psi (per crack).
  VecC apply(const Perturbation& h, const std::vector<VecC>& psi) const {
    const std::size_t nc = grids_.size();
    int N = 0;
    for (const auto& g : grids_) N += g.n;
    VecC w = VecC::Zero(N);
    int ao = 0;
    for (std::size_t a = 0; a < nc; ++a) {
      const auto& ga = grids_[a];
      if (!h.zero_on(a)) {
        const auto& ps = h.parts[a];
        for (int i = 0; i < ga.n; ++i) {
          cplx acc = diagfac_[a][i] * ga.dz[i].dot(ps.dh[i]) * psi[a][i];
          for (int j = 0; j < ga.n; ++j) {
            if (j == i) continue;
            double P = (ga.z[i] - ga.z[j]).dot(ps.h[i] - ps.h[j]);
            acc += KD_[a](i, j) * P * psi[a][j];
          }
          w[ao + i] += acc;
        }
      }
      for (std::size_t b = 0; b < nc; ++b) {
        if (b != a && (!h.zero_on(a) || !h.zero_on(b))) {
          const auto& gb = grids_[b];
          const MatC& gx = Gx_[a * nc + b];
          const MatC& gy = Gy_[a * nc + b];
          for (int i = 0; i < ga.n; ++i) {
            cplx acc = 0.0;
            for (int j = 0; j < gb.n; ++j) {
              Vec2 ha = h.zero_on(a) ? Vec2{} : h.parts[a].h[i];
              Vec2 hb = h.zero_on(b) ? Vec2{} : h.parts[b].h[j];
              acc += ((ha.x - hb.x) * gx(i, j) + (ha.y - hb.y) * gy(i, j)) * psi[b][j];
            }
            w[ao + i] += acc;
          }
        }
      }
      ao += ga.n;
    }
    return w;
  }

  // Full S_k'(h) matrix (tests and order checks).
  MatC materialize(const Perturbation& h) const {
    const std::size_t nc = grids_.size();
    int N = 0;
    for (const auto& g : grids_) N += g.n;
    MatC S = MatC::Zero(N, N);
    int ao = 0;
    for (std::size_t a = 0; a < nc; ++a) {
      const auto& ga = grids_[a];
      int bo = 0;
      for (std::size_t b = 0; b < nc; ++b) {
        const auto& gb = grids_[b];
        if (a == b) {
          if (!h.zero_on(a)) {
            const auto& ps = h.parts[a];
            for (int i = 0; i < ga.n; ++i) {
              S(ao + i, ao + i) = diagfac_[a][i] * ga.dz[i].dot(ps.dh[i]);
              for (int j = 0; j < ga.n; ++j) {
                if (j == i) continue;
                double P = (ga.z[i] - ga.z[j]).dot(ps.h[i] - ps.h[j]);
                S(ao + i, bo + j) = KD_[a](i, j) * P;
              }
            }
          }
        } else if (!h.zero_on(a) || !h.zero_on(b)) {
          const MatC& gx = Gx_[a * nc + b];
          const MatC& gy = Gy_[a * nc + b];
          for (int i = 0; i < ga.n; ++i)
            for (int j = 0; j < gb.n; ++j) {
              Vec2 ha = h.zero_on(a) ? Vec2{} : h.parts[a].h[i];
              Vec2 hb = h.zero_on(b) ? Vec2{} : h.parts[b].h[j];
              S(ao + i, bo + j) = (ha.x - hb.x) * gx(i, j) + (ha.y - hb.y) * gy(i, j);
            }
        }
        bo += gb.n;
      }
      ao += ga.n;
    }
    return S;
  }

  const std::vector<NystromGrid>& grids() const { return grids_; }

 private:
  std::vector<NystromGrid> grids_;
  double k_;
  std::vector<MatC> KD_;                 // per crack, folded, zero diagonal
  std::vector<std::vector<double>> diagfac_;
  std::vector<MatC> Gx_, Gy_;            // cross-block gradient kernels
};

// Far field of the shape derivative in direction h.
inline std::vector<cplx> frechet_farfield(const DensitySolution& sol, const DerivAssembly& da,
                                          const Perturbation& h, const std::vector<Vec2>& dirs) {
  const auto& grids = sol.grids;
  // v2 density
  VecC w = da.apply(h, sol.psi);
  VecC chi = sol.lu->solve(w);
  // v3 density from the moved incident trace
  int N = sol.total_nodes();
  VecC rhs = VecC::Zero(N);
  int o = 0;
  for (std::size_t c = 0; c < grids.size(); ++c) {
    for (int j = 0; j < grids[c].n; ++j) {
      if (!h.zero_on(c)) {
        cplx ui = incident_field(sol.k, sol.d, grids[c].z[j]);
        cplx ik{0.0, sol.k};
        rhs[o] = -(h.parts[c].h[j].dot(sol.d)) * ik * ui;
      }
      ++o;
    }
  }
  VecC xi = sol.lu->solve(rhs);

  std::vector<VecC> chic, xic;
  o = 0;
  for (const auto& g : grids) {
    chic.emplace_back(chi.segment(o, g.n));
    xic.emplace_back(xi.segment(o, g.n));
    o += g.n;
  }
  std::vector<cplx> out(dirs.size());
  cplx pref = farfield_prefactor(sol.k);
  for (std::size_t r = 0; r < dirs.size(); ++r) {
    const Vec2& xh = dirs[r];
    cplx v1 = 0.0;
    for (std::size_t c = 0; c < grids.size(); ++c) {
      if (h.zero_on(c)) continue;
      const auto& g = grids[c];
      cplx s = 0.0;
      for (int j = 0; j < g.n; ++j) {
        cplx ikxh{0.0, sol.k * xh.dot(h.parts[c].h[j])};
        s += ikxh * std::exp(cplx{0.0, -sol.k * xh.dot(g.z[j])}) * sol.psi[c][j];
      }
      v1 -= pref * (pi / g.n) * s;
    }
    cplx v2 = -farfield_of_density(grids, chic, sol.k, xh);
    cplx v3 = farfield_of_density(grids, xic, sol.k, xh);
    out[r] = v1 + v2 + v3;
  }
  return out;
}

struct JacobianCol {
  std::size_t crack = 0;
  bool horizontal = false;
  int index = 0;  // Chebyshev order, or power 0/1 for horizontal columns
};

struct JacobianBlock {
  MatC J;  // dirs x columns
  std::vector<JacobianCol> cols;
};

// Columns per crack: vertical T_0..T_p, then horizontal s^0, s^1 when enabled.
inline JacobianBlock jacobian(const DensitySolution& sol, const DerivAssembly& da, int p,
                              const std::vector<bool>& horizontal_enabled,
                              const std::vector<Vec2>& dirs) {
  JacobianBlock jb;
  std::vector<std::vector<cplx>> cols;
  for (std::size_t c = 0; c < sol.grids.size(); ++c) {
    for (int i = 0; i <= p; ++i) {
      cols.push_back(frechet_farfield(sol, da, make_vertical_cheb(sol.grids, c, i), dirs));
      jb.cols.push_back({c, false, i});
    }
    if (horizontal_enabled[c]) {
      for (int i = 0; i <= 1; ++i) {
        cols.push_back(frechet_farfield(sol, da, make_horizontal_power(sol.grids, c, i), dirs));
        jb.cols.push_back({c, true, i});
      }
    }
  }
  jb.J.resize(dirs.size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t r = 0; r < dirs.size(); ++r) jb.J(r, j) = cols[j][r];
  return jb;
}

inline JacobianBlock jacobian(const DensitySolution& sol, int p,
                              const std::vector<bool>& horizontal_enabled,
                              const std::vector<Vec2>& dirs) {
  DerivAssembly da(sol.grids, sol.k);
  return jacobian(sol, da, p, horizontal_enabled, dirs);
}

// Central-difference Jacobian of the full discrete forward map; same column
// order as jacobian().
inline JacobianBlock fd_jacobian(const CrackSet& cs, int n, double k, const Vec2& d, int p,
                                 const std::vector<bool>& horizontal_enabled, double eps,
                                 const std::vector<Vec2>& dirs) {
  std::vector<NystromGrid> base = build_grids(cs, n);
  JacobianBlock jb;
  std::vector<std::vector<cplx>> cols;
  auto push = [&](const Perturbation& h, const JacobianCol& info) {
    std::vector<NystromGrid> gp = base, gm = base;
    for (std::size_t c = 0; c < base.size(); ++c) {
      if (h.zero_on(c)) continue;
      gp[c] = perturb_grid(base[c], h.parts[c], eps);
      gm[c] = perturb_grid(base[c], h.parts[c], -eps);
    }
    DensitySolution sp = solve_density(gp, k, {d})[0];
    DensitySolution sm = solve_density(gm, k, {d})[0];
    FarFieldSet fp = far_field(sp, dirs);
    FarFieldSet fm = far_field(sm, dirs);
    std::vector<cplx> col(dirs.size());
    for (std::size_t r = 0; r < dirs.size(); ++r)
      col[r] = (fp.values[r] - fm.values[r]) / (2.0 * eps);
    cols.push_back(std::move(col));
    jb.cols.push_back(info);
  };
  for (std::size_t c = 0; c < base.size(); ++c) {
    for (int i = 0; i <= p; ++i) push(make_vertical_cheb(base, c, i), {c, false, i});
    if (horizontal_enabled[c])
      for (int i = 0; i <= 1; ++i) push(make_horizontal_power(base, c, i), {c, true, i});
  }
  jb.J.resize(dirs.size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t r = 0; r < dirs.size(); ++r) jb.J(r, j) = cols[j][r];
  return jb;
}

// Uniform-flag conveniences: one horizontal-enabled setting for every crack.
inline JacobianBlock jacobian(const DensitySolution& sol, const DerivAssembly& da, int p,
                              bool horizontal_enabled, const std::vector<Vec2>& dirs) {
  return jacobian(sol, da, p, std::vector<bool>(sol.grids.size(), horizontal_enabled), dirs);
}

inline JacobianBlock jacobian(const DensitySolution& sol, int p, bool horizontal_enabled,
                              const std::vector<Vec2>& dirs) {
  return jacobian(sol, p, std::vector<bool>(sol.grids.size(), horizontal_enabled), dirs);
}

inline JacobianBlock fd_jacobian(const CrackSet& cs, int n, double k, const Vec2& d, int p,
                                 bool horizontal_enabled, double eps,
                                 const std::vector<Vec2>& dirs) {
  return fd_jacobian(cs, n, k, d, p, std::vector<bool>(cs.size(), horizontal_enabled), eps,
                     dirs);
}

}  // namespace arcscat
