#pragma once

// Gauss-Newton reconstruction of crack geometry from far-field data.
// Unknowns per crack: Chebyshev vertical coefficients c_0..c_p plus the
// affine horizontal axis (d0, d1). The update solves a Tikhonov-regularized
// real least-squares system (real and imaginary parts stacked), clamps each
// coefficient change, and halves rejected steps until the geometry passes
// validity_check. Order escalation pads new coefficients with zeros; the
// multi-frequency driver carries p across stages and freezes the horizontal
// axis beyond the first stage.

#include <algorithm>
#include <optional>
#include <sstream>
#include <vector>

#include "frechet.hpp"

namespace arcscat {

struct NewtonConfig {
  int p0 = 1;                     // initial Chebyshev order
  int m_p = 4;                    // maximal Chebyshev order
  double eps_stop = 0.001;        // inner loop: stop when |dJ_r| <= eps_stop
  double tikhonov_lambda = 1e-8;  // relative weight; lambda = rel * trace(AtA)/ncols
  int max_inner = 30;
  double step_clamp = 0.5;
  int damping_retries = 5;
  double d_min = 0.05;            // pairwise clearance for validity checks
  double horiz_guard = 1e-8;      // drop horizontal columns when any falls below
                                  // horiz_guard * ||J||_F
  bool use_fd = false;            // central-difference Jacobian fallback
  double fd_eps = 1e-5;
};

struct IterationRecord {
  double stage_k = 0.0;
  int p = 0;
  int iter = 0;  // 0 marks the evaluation of the stage's starting state
  double J_r = 0.0;
  double step_norm = 0.0;
  bool damped = false;
};

struct ReconstructionState {
  std::vector<ChebCrack> cracks;
  int p = 0;
  std::vector<IterationRecord> history;
  int stage = 0;
  bool horizontal_frozen = false;
  bool target_missed = false;
  double J_r = 0.0;
  std::string note;  // diagnostics when a run aborts early
};

// One frequency's worth of measurements (possibly several incident
// directions, fused by row stacking).
struct StageData {
  double k = 0.0;
  std::vector<FarFieldSet> sets;
  std::optional<double> eps_target;
  int n = 0;  // Nystrom nodes per crack; 0 selects by wavenumber
};

inline int auto_nodes(double k) { return k <= 5.0 ? 64 : 128; }

namespace detail {

inline CrackSet as_crack_set(const std::vector<ChebCrack>& cracks, double d_min) {
  CrackSet cs;
  cs.d_min = d_min;
  for (const auto& c : cracks) cs.cracks.emplace_back(c);
  return cs;
}

inline int stage_nodes(const StageData& sd) { return sd.n > 0 ? sd.n : auto_nodes(sd.k); }

struct StageEval {
  std::vector<DensitySolution> sols;  // one per data set
  double J_r = 0.0;
};

inline StageEval eval_stage(const std::vector<ChebCrack>& cracks, const StageData& sd,
                            double d_min) {
  CrackSet cs = as_crack_set(cracks, d_min);
  std::vector<NystromGrid> grids = build_grids(cs, stage_nodes(sd));
  std::vector<Vec2> ds;
  ds.reserve(sd.sets.size());
  for (const auto& s : sd.sets) ds.push_back(s.d);
  StageEval ev;
  ev.sols = solve_density(grids, sd.k, ds);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < sd.sets.size(); ++i) {
    FarFieldSet model = far_field(ev.sols[i], sd.sets[i].dirs);
    for (std::size_t j = 0; j < model.values.size(); ++j) {
      num += std::norm(model.values[j] - sd.sets[i].values[j]);
      den += std::norm(sd.sets[i].values[j]);
    }
  }
  ev.J_r = std::sqrt(num) / std::sqrt(den);
  return ev;
}

}  // namespace detail

// Relative data misfit of a candidate crack configuration.
inline double residual(const std::vector<ChebCrack>& cracks, const StageData& sd,
                       double d_min = 0.05) {
  return detail::eval_stage(cracks, sd, d_min).J_r;
}

namespace detail {

// One Gauss-Newton step from the already-evaluated state. Returns the updated
// cracks; fills step_norm/damped. Throws StepRejectedError when damping runs
// out of retries.
inline std::vector<ChebCrack> newton_step_impl(const std::vector<ChebCrack>& cracks,
                                               const StageEval& ev, const StageData& sd,
                                               const NewtonConfig& cfg, int p,
                                               bool horizontal_frozen, double& step_norm,
                                               bool& damped) {
  const std::size_t ncr = cracks.size();
  std::vector<bool> horiz(ncr, !horizontal_frozen);

  std::vector<JacobianBlock> blocks;
  int mrows = 0;
  if (cfg.use_fd) {
    CrackSet cs = as_crack_set(cracks, cfg.d_min);
    for (std::size_t i = 0; i < sd.sets.size(); ++i) {
      blocks.push_back(fd_jacobian(cs, stage_nodes(sd), sd.k, sd.sets[i].d, p, horiz,
                                   cfg.fd_eps, sd.sets[i].dirs));
      mrows += static_cast<int>(sd.sets[i].dirs.size());
    }
  } else {
    DerivAssembly da(ev.sols[0].grids, sd.k);
    for (std::size_t i = 0; i < sd.sets.size(); ++i) {
      blocks.push_back(jacobian(ev.sols[i], da, p, horiz, sd.sets[i].dirs));
      mrows += static_cast<int>(sd.sets[i].dirs.size());
    }
  }
  const int ncols = static_cast<int>(blocks[0].cols.size());
  MatC J(mrows, ncols);
  VecC rhs(mrows);
  int ro = 0;
  for (std::size_t i = 0; i < sd.sets.size(); ++i) {
    const int m = static_cast<int>(sd.sets[i].dirs.size());
    J.block(ro, 0, m, ncols) = blocks[i].J;
    FarFieldSet model = far_field(ev.sols[i], sd.sets[i].dirs);
    for (int j = 0; j < m; ++j) rhs[ro + j] = sd.sets[i].values[j] - model.values[j];
    ro += m;
  }

  // Column bookkeeping with the horizontal guard: a near-zero horizontal
  // column signals an unidentifiable axis, in which case the step solves the
  // vertical-only system.
  std::vector<JacobianCol> cols = blocks[0].cols;
  bool drop_horizontal = false;
  if (!horizontal_frozen) {
    double jf = J.norm();
    for (int j = 0; j < ncols; ++j)
      if (cols[j].horizontal && J.col(j).norm() < cfg.horiz_guard * jf) drop_horizontal = true;
  }
  std::vector<int> keep;
  for (int j = 0; j < ncols; ++j)
    if (!(drop_horizontal && cols[j].horizontal)) keep.push_back(j);

  const int nk = static_cast<int>(keep.size());
  MatR A(2 * mrows, nk);
  VecR b(2 * mrows);
  for (int j = 0; j < nk; ++j) {
    A.col(j).head(mrows) = J.col(keep[j]).real();
    A.col(j).tail(mrows) = J.col(keep[j]).imag();
  }
  b.head(mrows) = rhs.real();
  b.tail(mrows) = rhs.imag();

  double lambda = cfg.tikhonov_lambda * A.squaredNorm() / nk;  // squaredNorm = trace(AtA)
  VecR upd = tikhonov_lstsq(A, b, lambda);
  for (int j = 0; j < nk; ++j) upd[j] = std::clamp(upd[j], -cfg.step_clamp, cfg.step_clamp);

  double scale = 1.0;
  damped = false;
  ValidityReport last_rep;
  for (int attempt = 0; attempt <= cfg.damping_retries; ++attempt) {
    std::vector<ChebCrack> cand = cracks;
    for (int j = 0; j < nk; ++j) {
      const JacobianCol& ci = cols[keep[j]];
      double dv = scale * upd[j];
      if (ci.horizontal) {
        if (ci.index == 0)
          cand[ci.crack].d0 += dv;
        else
          cand[ci.crack].d1 += dv;
      } else {
        cand[ci.crack].c[ci.index] += dv;
      }
    }
    ValidityReport rep = validity_check(as_crack_set(cand, cfg.d_min));
    if (rep.ok) {
      step_norm = scale * upd.norm();
      damped = attempt > 0;
      return cand;
    }
    last_rep = rep;
    scale *= 0.5;
  }
  std::ostringstream oss;
  oss << "step rejected after " << cfg.damping_retries
      << " halvings; last validity failure: ";
  oss << (last_rep.problems.empty() ? std::string("geometry constraint violated")
                                    : last_rep.problems.front());
  throw StepRejectedError(oss.str());
}

}  // namespace detail

// Single exposed Gauss-Newton step (diagnostics and tests); the run loops
// below share the same implementation.
inline std::vector<ChebCrack> newton_step(const std::vector<ChebCrack>& cracks,
                                          const StageData& sd, const NewtonConfig& cfg, int p,
                                          bool horizontal_frozen = false,
                                          double* step_norm_out = nullptr,
                                          bool* damped_out = nullptr) {
  detail::StageEval ev = detail::eval_stage(cracks, sd, cfg.d_min);
  double sn = 0.0;
  bool damped = false;
  auto out = detail::newton_step_impl(cracks, ev, sd, cfg, p, horizontal_frozen, sn, damped);
  if (step_norm_out) *step_norm_out = sn;
  if (damped_out) *damped_out = damped;
  return out;
}

namespace detail {

// Shared stage loop: escalate p from p_start to cfg.m_p, iterating at each
// order until the residual change stalls, stopping early when the target is
// met. Updates state in place; returns true when the target (if any) was
// reached.
inline bool run_stage(ReconstructionState& state, const StageData& sd, const NewtonConfig& cfg,
                      int p_start, bool horizontal_frozen) {
  const double k = sd.k;
  for (auto& c : state.cracks)
    if (static_cast<int>(c.c.size()) < p_start + 1) c.c.resize(p_start + 1, 0.0);

  StageEval ev = eval_stage(state.cracks, sd, cfg.d_min);
  state.J_r = ev.J_r;
  state.history.push_back({k, p_start, 0, ev.J_r, 0.0, false});

  std::vector<ChebCrack> best = state.cracks;
  double best_J = ev.J_r;
  int best_p = p_start;

  auto finish = [&](bool reached) {
    if (!reached && state.J_r > best_J) {
      state.cracks = best;
      state.J_r = best_J;
      state.p = best_p;
    }
    return reached;
  };

  if (sd.eps_target && ev.J_r < *sd.eps_target) {
    state.p = p_start;
    return finish(true);
  }

  for (int p = p_start; p <= cfg.m_p; ++p) {
    state.p = p;
    for (auto& c : state.cracks)
      if (static_cast<int>(c.c.size()) < p + 1) c.c.resize(p + 1, 0.0);
    double J_prev = state.J_r;
    for (int iter = 1; iter <= cfg.max_inner; ++iter) {
      double sn = 0.0;
      bool damped = false;
      std::vector<ChebCrack> next;
      try {
        next = newton_step_impl(state.cracks, ev, sd, cfg, p, horizontal_frozen, sn, damped);
      } catch (const StepRejectedError& e) {
        state.note = e.what();
        finish(false);
        return false;
      }
      StageEval ev_next;
      try {
        ev_next = eval_stage(next, sd, cfg.d_min);
      } catch (const SingularMatrixError& e) {
        state.note = std::string("forward solve failed after step: ") + e.what();
        finish(false);
        return false;
      }
      state.cracks = std::move(next);
      ev = std::move(ev_next);
      state.J_r = ev.J_r;
      state.history.push_back({k, p, iter, ev.J_r, sn, damped});
      if (ev.J_r < best_J) {
        best = state.cracks;
        best_J = ev.J_r;
        best_p = p;
      }
      if (sd.eps_target && ev.J_r < *sd.eps_target) return finish(true);
      double dJ = std::abs(ev.J_r - J_prev);
      J_prev = ev.J_r;
      if (dJ <= cfg.eps_stop) break;
    }
  }
  return finish(!sd.eps_target.has_value());
}

}  // namespace detail

inline ReconstructionState run_single_freq(const std::vector<ChebCrack>& initial,
                                           const StageData& sd, const NewtonConfig& cfg) {
  ReconstructionState state;
  state.cracks = initial;
  bool reached = detail::run_stage(state, sd, cfg, cfg.p0, false);
  state.target_missed = sd.eps_target.has_value() && !reached;
  return state;
}

// Multi-frequency continuation: stage 0 starts at cfg.p0 with a free
// horizontal axis; later stages reuse the reached order and freeze the axis.
inline ReconstructionState run_multi_freq(const std::vector<ChebCrack>& initial,
                                          const std::vector<StageData>& stages,
                                          const NewtonConfig& cfg) {
  for (std::size_t i = 1; i < stages.size(); ++i)
    if (!(stages[i].k > stages[i - 1].k))
      throw std::invalid_argument("stage frequencies must be strictly increasing");
  // The missed-target flag reports on the last targeted stage only: an
  // intermediate target is an escalation control (a stage that cannot reach
  // it hands over at the order cap), while the final target is the quality
  // contract for the returned reconstruction.
  std::size_t last_targeted = stages.size();
  for (std::size_t i = 0; i < stages.size(); ++i)
    if (stages[i].eps_target) last_targeted = i;
  ReconstructionState state;
  state.cracks = initial;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    state.stage = static_cast<int>(i);
    state.horizontal_frozen = i > 0;
    int p_start = i == 0 ? cfg.p0 : state.p;
    bool reached = detail::run_stage(state, stages[i], cfg, p_start, i > 0);
    if (i == last_targeted) state.target_missed = !reached;
    if (!state.note.empty()) {
      // An abort leaves later stages unattempted; an unattempted final
      // target counts as missed.
      if (last_targeted < stages.size() && i < last_targeted) state.target_missed = true;
      break;
    }
  }
  return state;
}

// Audit helper: number of accepted steps that increased the misfit.
inline int count_residual_increases(const std::vector<IterationRecord>& hist) {
  int bad = 0;
  for (std::size_t i = 1; i < hist.size(); ++i)
    if (hist[i].iter > 0 && hist[i].stage_k == hist[i - 1].stage_k &&
        hist[i].J_r > hist[i - 1].J_r)
      ++bad;
  return bad;
}

}  // namespace arcscat
