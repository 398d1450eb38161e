#pragma once

#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "grid.hpp"
#include "grid_ops.hpp"
#include "linsolve.hpp"
#include "metrics.hpp"
#include "reweighting.hpp"
#include "sampling.hpp"
#include "shrinkage.hpp"
#include "transforms.hpp"

namespace csrecon {

// Raised when the iteration produces non-finite values; the CLI maps it to
// a dedicated exit code.
struct NumericAbort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Which regularizer branches are active.
//   full           : transform l1 + second-order TGV (w, d, t splits, free v)
//   transform_only : transform l1 alone (w split, 1x1 system)
//   tgv_only       : second-order TGV alone (d, t splits, free v)
//   tv_only        : first-order TV alone (d split, v pinned to zero)
enum class SolverMode { full, transform_only, tgv_only, tv_only };

inline const char* to_string(SolverMode m) {
  switch (m) {
    case SolverMode::full: return "full";
    case SolverMode::transform_only: return "transform";
    case SolverMode::tgv_only: return "tgv";
    case SolverMode::tv_only: return "tv";
  }
  return "?";
}

// The data term aims at y + y_k with y_0 = 0 ("additive") or at the
// accumulated y_k with y_0 = y ("accumulated"); both produce identical
// iterates, the switch exists to make that checkable.
enum class RhsVariant { additive, accumulated };

struct SolverConfig {
  SolverMode mode = SolverMode::full;
  double alpha0 = 1.0;  // weight of the second-order TGV term
  double alpha1 = 2.0;  // weight of the first-order TGV term
  SplitPenalties pen{};
  ReweightOptions reweight{};
  int inner_iters = 4;  // sweeps between Bregman updates
  int gs_iters = 2;     // block Gauss-Seidel passes per sweep
  int max_iter = 100;
  int cg_iters = 0;  // 0: per-frequency direct solve (needs Fourier-diagonal A)
  double cg_tol = 1e-8;
  RhsVariant rhs_variant = RhsVariant::additive;

  SystemFlags system_flags() const {
    SystemFlags f;
    f.with_transform = mode == SolverMode::full || mode == SolverMode::transform_only;
    f.with_grad = mode != SolverMode::transform_only;
    f.with_v = mode == SolverMode::full || mode == SolverMode::tgv_only;
    return f;
  }

  void validate() const {
    if (!(pen.mu1 > 0 && pen.mu2 > 0 && pen.mu3 > 0 && pen.beta > 0))
      throw std::invalid_argument("solver config: penalties must be strictly positive");
    if (!(reweight.epsilon > 0)) throw std::invalid_argument("solver config: epsilon must be positive");
    if (inner_iters < 1 || gs_iters < 1 || max_iter < 1)
      throw std::invalid_argument("solver config: iteration counts must be >= 1");
    if (alpha0 < 0 || alpha1 < 0)
      throw std::invalid_argument("solver config: alpha weights must be nonnegative");
  }
};

struct SolverState {
  ImageGrid u;
  VectorField v;
  SubbandStack w, bw;
  VectorField d, bd;
  SymTensorField t, bt;
  std::vector<cplx> yk;
  int iteration = 0;
};

struct LogRow {
  int iter = 0;
  double re = std::nan("");
  double ssim = std::nan("");
  double residual = 0.0;
  double objective = 0.0;
  double seconds = 0.0;
};

using ConvergenceLog = std::vector<LogRow>;

inline void write_log_csv(std::ostream& os, const ConvergenceLog& log) {
  os.precision(10);
  os << "iter,re,ssim,residual,objective,seconds\n";
  for (const auto& r : log) {
    os << r.iter << ',' << r.re << ',' << r.ssim << ',' << r.residual << ',' << r.objective << ','
       << r.seconds << '\n';
  }
}

// Current value of the discretized objective
//   sum_j lambda_j ||W_j (Psi u)_j||_1 + alpha1 ||grad u - v||_1 + alpha0 ||E v||_1
// with whatever weights are in force; telemetry only, never used to stop.
inline double objective_surrogate(const SolverConfig& cfg, const SubbandStack* coeffs,
                                  const WeightSchedule* sched, const ImageGrid& u,
                                  const VectorField& v) {
  const SystemFlags f = cfg.system_flags();
  double val = 0.0;
  if (f.with_transform && coeffs && sched) {
    for (size_t j = 0; j < coeffs->size(); ++j) {
      if (sched->lambda[j] == 0.0) continue;
      double l1 = 0.0;
      for (size_t l = 0; l < (*coeffs)[j].size(); ++l)
        l1 += sched->w[j][l] * std::abs((*coeffs)[j][l]);
      val += sched->lambda[j] * l1;
    }
  }
  if (f.with_grad) {
    VectorField g = forward_gradient(u);
    g -= v;
    val += cfg.alpha1 * vec_l1_norm(g);
  }
  if (f.with_v) val += cfg.alpha0 * tensor_l1_norm(sym_gradient(v));
  return val;
}

namespace detail {

inline double measurement_norm(const std::vector<cplx>& y) {
  double s = 0;
  for (const auto& v : y) s += std::norm(v);
  return std::sqrt(s);
}

}  // namespace detail

// Split Bregman reconstruction: solve
//   min sum_j lambda_j ||W_j Psi_j u||_1 + alpha1 ||grad u - v||_1
//       + alpha0 ||E v||_1   s.t.  A u = y
// by variable splitting (w = Psi u, d = grad u - v, t = E v), alternating
// exact/CG solves of the coupled (u, v) system with shrinkage of the
// splits, Bregman updates of the split multipliers, and the additive data
// update y_k <- y_k + y - A u.  Weights are refreshed from the running
// iterate inside every pass, which is what makes the multilevel reweighting
// part of the algorithm rather than an outer loop around it.
inline std::pair<ImageGrid, ConvergenceLog> split_bregman_reconstruct(
    const SamplingOperator& A, const MultilevelTransform* t, const std::vector<cplx>& y,
    const SolverConfig& cfg, const ImageGrid* reference = nullptr) {
  cfg.validate();
  const SystemFlags flags = cfg.system_flags();
  if (flags.with_transform && t == nullptr)
    throw std::invalid_argument("split_bregman_reconstruct: mode requires a transform");
  if (y.size() != A.measurement_count())
    throw std::invalid_argument("split_bregman_reconstruct: measurement size mismatch");

  const int n = A.n();
  const BlockSpectra S = assemble_spectra(flags, cfg.pen, t, A);
  const bool diagonal_path = S.has_b1 && cfg.cg_iters == 0;
  if (!S.has_b1 && cfg.cg_iters <= 0)
    throw std::invalid_argument("split_bregman_reconstruct: operator needs cg_iters > 0");

  SolverState st;
  st.u = A.adjoint(y);
  st.v = VectorField(n);
  if (flags.with_transform) {
    st.w = make_stack(t->subband_count(), n);
    st.bw = make_stack(t->subband_count(), n);
  }
  st.d = VectorField(n);
  st.bd = VectorField(n);
  st.t = SymTensorField(n);
  st.bt = SymTensorField(n);
  st.yk.assign(y.size(), cplx(0.0));
  if (cfg.rhs_variant == RhsVariant::accumulated) st.yk = y;

  const double ynorm = detail::measurement_norm(y);
  ConvergenceLog log;
  log.reserve(cfg.max_iter);
  const auto start = std::chrono::steady_clock::now();

  std::vector<cplx> target(y.size());
  SubbandStack coeffs;
  WeightSchedule sched;

  for (int k = 1; k <= cfg.max_iter; ++k) {
    for (int i = 0; i < cfg.inner_iters; ++i) {
      for (int g = 0; g < cfg.gs_iters; ++g) {
        if (cfg.rhs_variant == RhsVariant::additive)
          for (size_t l = 0; l < y.size(); ++l) target[l] = y[l] + st.yk[l];
        else
          target = st.yk;

        RightHandSide rhs = build_rhs(flags, cfg.pen, t, A, target,
                                      flags.with_transform ? &st.w : nullptr,
                                      flags.with_transform ? &st.bw : nullptr,
                                      flags.with_grad ? &st.d : nullptr,
                                      flags.with_grad ? &st.bd : nullptr,
                                      flags.with_v ? &st.t : nullptr,
                                      flags.with_v ? &st.bt : nullptr);
        UvSolution sol =
            diagonal_path
                ? solve_diagonal(S, rhs)
                : solve_triangular_cg(S, rhs, A, st.u, st.v, cfg.cg_iters, cfg.cg_tol);
        st.u = std::move(sol.u);
        st.v = std::move(sol.v);
        if (!st.u.all_finite() || !st.v.all_finite())
          throw NumericAbort("solver state became non-finite in the (u,v) solve");

        if (flags.with_transform) {
          coeffs = t->analyze(st.u);
          sched = make_schedule(cfg.reweight, coeffs);
          for (size_t j = 0; j < coeffs.size(); ++j) {
            const double lam = sched.lambda[j] / cfg.pen.mu1;
            for (size_t l = 0; l < coeffs[j].size(); ++l)
              st.w[j][l] = shrink(coeffs[j][l] + st.bw[j][l], lam * sched.w[j][l]);
          }
        }
        if (flags.with_grad) {
          VectorField gv = forward_gradient(st.u);
          gv -= st.v;
          gv += st.bd;
          shrink2(gv, cfg.alpha1 / cfg.pen.mu2);
          st.d = std::move(gv);
        }
        if (flags.with_v) {
          SymTensorField ev = sym_gradient(st.v);
          ev += st.bt;
          shrink_frob(ev, cfg.alpha0 / cfg.pen.mu3);
          st.t = std::move(ev);
        }
      }
    }

    // Bregman updates with the sweep's final iterate.
    if (flags.with_transform) {
      coeffs = t->analyze(st.u);
      for (size_t j = 0; j < coeffs.size(); ++j) {
        st.bw[j] += coeffs[j];
        st.bw[j] -= st.w[j];
      }
    }
    if (flags.with_grad) {
      VectorField gv = forward_gradient(st.u);
      gv -= st.v;
      gv -= st.d;
      st.bd += gv;
    }
    if (flags.with_v) {
      SymTensorField ev = sym_gradient(st.v);
      ev -= st.t;
      st.bt += ev;
    }
    std::vector<cplx> Au = A.forward(st.u);
    double rnorm = 0;
    for (size_t l = 0; l < y.size(); ++l) {
      st.yk[l] += y[l] - Au[l];
      rnorm += std::norm(Au[l] - y[l]);
    }
    st.iteration = k;

    LogRow row;
    row.iter = k;
    row.residual = ynorm > 0 ? std::sqrt(rnorm) / ynorm : std::sqrt(rnorm);
    if (flags.with_transform) sched = make_schedule(cfg.reweight, coeffs);
    row.objective = objective_surrogate(cfg, flags.with_transform ? &coeffs : nullptr,
                                        flags.with_transform ? &sched : nullptr, st.u, st.v);
    if (reference) {
      row.re = relative_error(*reference, st.u);
      row.ssim = ssim(*reference, st.u);
    }
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log.push_back(row);
  }

  return {std::move(st.u), std::move(log)};
}

enum class IhtStrategy { f1, f2 };

// Iterative hard thresholding for inpainting: alternate data substitution
// with hard thresholding in the transform domain.  Thresholds are derived
// from the current coefficients by the chosen strategy and annealed by the
// decay factor sigma: the scale sigma^k -> 0 hands the final iterations
// over to data consistency, the classical decreasing-threshold schedule.
inline std::pair<ImageGrid, ConvergenceLog> iht_inpaint(
    const SamplingOperator& A, const MultilevelTransform& t, const std::vector<cplx>& y,
    IhtStrategy strategy, double lam_or_mu, double eps, double sigma, int iters,
    const ImageGrid* reference = nullptr) {
  if (!(sigma > 0.0 && sigma < 1.0))
    throw std::invalid_argument("iht_inpaint: sigma must lie in (0, 1)");
  if (iters < 1) throw std::invalid_argument("iht_inpaint: iters must be >= 1");

  const int n = A.n();
  ImageGrid u_rec(n);
  const double ynorm = detail::measurement_norm(y);
  ConvergenceLog log;
  log.reserve(iters);
  const auto start = std::chrono::steady_clock::now();

  double decay = 1.0;
  for (int k = 1; k <= iters; ++k) {
    decay *= sigma;
    std::vector<cplx> Au = A.forward(u_rec);
    double rnorm = 0;
    for (size_t l = 0; l < Au.size(); ++l) {
      const cplx diff = y[l] - Au[l];
      rnorm += std::norm(diff);
      Au[l] = diff;
    }
    ImageGrid x = A.adjoint(Au);  // residual image
    x += u_rec;

    SubbandStack c = t.analyze(x);
    WeightPlanes delta = strategy == IhtStrategy::f1 ? iht_strategy_f1(c, lam_or_mu, eps)
                                                     : iht_strategy_f2(c, lam_or_mu, eps);
    for (auto& plane : delta)
      for (auto& v : plane) v *= decay;
    hard_threshold(c, delta);
    u_rec = t.synthesize(c);
    if (!u_rec.all_finite()) throw NumericAbort("iht state became non-finite");

    LogRow row;
    row.iter = k;
    row.residual = ynorm > 0 ? std::sqrt(rnorm) / ynorm : std::sqrt(rnorm);
    if (reference) {
      row.re = relative_error(*reference, u_rec);
      row.ssim = ssim(*reference, u_rec);
    }
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log.push_back(row);
  }
  return {std::move(u_rec), std::move(log)};
}

}  // namespace csrecon
