// dive/solver.hpp
//
// Copyright 2026  dive authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef DIVE_SOLVER_HPP
#define DIVE_SOLVER_HPP

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "dive/segmented_data.hpp"
#include "dive/source_model.hpp"
#include "dive/types.hpp"

namespace dive {

enum class Algorithm { kFastDiva, kQuickIve };

inline Algorithm algorithm_from_name(const std::string& name) {
  if (name == "fastdiva") return Algorithm::kFastDiva;
  if (name == "quickive") return Algorithm::kQuickIve;
  throw ConfigError("unknown algorithm: " + name);
}

struct SolverConfig {
  Algorithm algorithm = Algorithm::kFastDiva;
  std::string model = "gauss";
  ModelOptions model_options{};
  double tol = 1e-6;
  int max_iter = 1000;
  double hessian_floor = 1e-10;
};

// Result of one extraction run.  Per-cell caches (SOI estimates and their
// variances) are recomputed from the final w before returning, so the state
// is always self-consistent:
//   sigma2[k,t,l] = w_k^H C_{k,t,l} w_k  and  w_k^H a_{k,t} = 1.
struct ExtractionState {
  std::vector<VecC> w;                 // per dataset k
  std::vector<std::vector<VecC>> a;    // [k][t]
  std::vector<RowVecC> s_hat;          // flat, indexed like dataset cells
  std::vector<double> sigma2;          // flat, indexed like dataset cells
  int iterations = 0;
  bool converged = false;
  int hessian_fallbacks = 0;
  std::vector<double> crit_trace;      // max over k, one entry per iteration

  Eigen::Index index(Eigen::Index k, Eigen::Index t, Eigen::Index l,
                     Eigen::Index T, Eigen::Index L) const {
    return (k * T + t) * L + l;
  }
};

// Block-orthogonality-constrained mixing vector: a = <C>_l w / (w^H <C>_l w).
// Guarantees w^H a = 1 and decorrelates the SOI estimate from the background
// on average over the block.
inline VecC update_a(const MatC& cbar, const VecC& w) {
  const cd den = w.dot(cbar * w);
  if (std::abs(den) < 1e-14)
    throw DegenerateStatError("mixing-vector update: direction has vanishing power");
  return cbar * w / den;
}

// Everything the Newton update needs for the current iterate: dependent
// mixing vectors, normalized gradient, and the two Hessian building blocks
//   t1_k = < <C>_l / <sigma2>_l >_t
//   t2_k = < < rho C / (nu^* sigma2) >_l >_t .
struct IterationEval {
  std::vector<std::vector<VecC>> a;  // [k][t]
  std::vector<VecC> grad;            // per k
  std::vector<MatC> t1, t2;          // per k
};

inline IterationEval evaluate_iteration(const SegmentedDataset& ds,
                                        const BlockStats& stats,
                                        const ModelBuilder& build,
                                        const std::vector<VecC>& w) {
  const Eigen::Index K = ds.K, T = ds.T, L = ds.L, d = ds.d;
  IterationEval ev;
  ev.a.assign(K, std::vector<VecC>(T));
  ev.grad.assign(K, VecC::Zero(d));
  ev.t1.assign(K, MatC::Zero(d, d));
  ev.t2.assign(K, MatC::Zero(d, d));

  for (Eigen::Index k = 0; k < K; ++k)
    for (Eigen::Index t = 0; t < T; ++t)
      ev.a[k][t] = update_a(stats.cov_mean(k, t), w[k]);

  std::vector<double> sigma(K);
  MatC u(K, ds.Ns);
  for (Eigen::Index t = 0; t < T; ++t) {
    std::vector<VecC> grad_term(K, VecC::Zero(d));
    std::vector<MatC> t2_term(K, MatC::Zero(d, d));
    std::vector<double> sig2_sum(K, 0.0);
    for (Eigen::Index l = 0; l < L; ++l) {
      for (Eigen::Index k = 0; k < K; ++k) {
        const MatC& x = ds.cell(k, t, l);
        const double s2 = w[k].dot(stats.cov(k, t, l) * w[k]).real();
        if (!(s2 > 0))
          throw DegenerateStatError("SOI estimate has non-positive variance");
        sigma[k] = std::sqrt(s2);
        sig2_sum[k] += s2;
        u.row(k) = (w[k].adjoint() * x) / sigma[k];
      }
      const auto model = build(u);
      const MatC phi = model->score(u);
      const VecC nu = model->nu();
      const VecC rho = model->rho();
      for (Eigen::Index k = 0; k < K; ++k) {
        const MatC& x = ds.cell(k, t, l);
        const VecC ephix =
            (x * phi.row(k).transpose()) / (double(ds.Ns) * sigma[k]);
        grad_term[k] += ephix / nu[k];
        t2_term[k] += (rho[k] / std::conj(nu[k]) / (sigma[k] * sigma[k])) *
                      stats.cov(k, t, l);
      }
    }
    for (Eigen::Index k = 0; k < K; ++k) {
      ev.grad[k] += (ev.a[k][t] - grad_term[k] / double(L)) / double(T);
      ev.t1[k] +=
          stats.cov_mean(k, t) / (sig2_sum[k] / double(L)) / double(T);
      ev.t2[k] += t2_term[k] / double(L * T);
    }
  }
  return ev;
}

namespace detail {

// A Hessian is unusable when it collapsed to zero relative to the scale of
// its building blocks or when its condition number exceeds 1/floor.
inline bool hessian_degenerate(const MatC& h, double floor_, double scale) {
  Eigen::JacobiSVD<MatC> svd(h);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  return smax <= floor_ * scale || smin <= floor_ * smax;
}

}  // namespace detail

// One simplified Newton update for every k.  FastDIVA uses H = t1 - t2 and
// falls back to the QuickIVE Hessian -t2 for this iteration when H is
// degenerate (constant-variance Gaussian regimes drive t1 - t2 to zero);
// fallbacks are counted in the returned state.
inline void newton_update(const IterationEval& ev,
                          const SolverConfig& cfg, std::vector<VecC>& w,
                          int& fallbacks) {
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double scale =
        std::max({ev.t1[k].norm(), ev.t2[k].norm(), 1e-300});
    MatC h;
    if (cfg.algorithm == Algorithm::kFastDiva) {
      h = ev.t1[k] - ev.t2[k];
      if (detail::hessian_degenerate(h, cfg.hessian_floor, scale)) {
        h = -ev.t2[k];
        ++fallbacks;
      }
    } else {
      h = -ev.t2[k];
    }
    if (detail::hessian_degenerate(h, cfg.hessian_floor, scale))
      throw SingularMatrixError("Newton step: Hessian is numerically singular");
    w[k] -= Eigen::PartialPivLU<MatC>(h).solve(ev.grad[k]);
  }
}

inline double direction_change(const VecC& w_new, const VecC& w_old) {
  const double den = w_new.norm() * w_old.norm();
  if (den == 0.0) return 1.0;
  return 1.0 - std::abs(w_new.dot(w_old)) / den;
}

// Full extraction loop: per iteration, refresh the dependent mixing vectors
// and per-cell statistics from the current w, take one simplified Newton
// step per k, and stop when the direction change of every w_k falls below
// tol.  The optional callback observes the iterate after every update (used
// for convergence traces).
inline ExtractionState run(
    const SegmentedDataset& ds, const SolverConfig& cfg,
    const std::vector<VecC>& w_ini,
    const std::function<void(int, const std::vector<VecC>&)>& on_iteration =
        {}) {
  if (static_cast<Eigen::Index>(w_ini.size()) != ds.K)
    throw ShapeError("one initial vector per dataset required");
  for (const auto& w0 : w_ini) {
    if (w0.size() != ds.d) throw ShapeError("initial vector has wrong length");
    if (w0.norm() == 0.0)
      throw InvalidParamsError("initial vector must be non-zero");
  }
  if (!(cfg.tol > 0) || cfg.max_iter < 1)
    throw ConfigError("solver needs tol > 0 and max_iter >= 1");

  const BlockStats stats = compute_stats(ds);
  const ModelBuilder build = make_model(cfg.model, cfg.model_options);

  ExtractionState st;
  st.w = w_ini;
  for (int it = 0; it < cfg.max_iter; ++it) {
    const auto ev = evaluate_iteration(ds, stats, build, st.w);
    const std::vector<VecC> w_old = st.w;
    newton_update(ev, cfg, st.w, st.hessian_fallbacks);
    double crit = 0.0;
    for (Eigen::Index k = 0; k < ds.K; ++k)
      crit = std::max(crit, direction_change(st.w[k], w_old[k]));
    st.crit_trace.push_back(crit);
    st.iterations = it + 1;
    if (on_iteration) on_iteration(it + 1, st.w);
    if (crit < cfg.tol) {
      st.converged = true;
      break;
    }
  }

  // final self-consistent caches
  st.a.assign(ds.K, std::vector<VecC>(ds.T));
  st.s_hat.resize(ds.cells.size());
  st.sigma2.resize(ds.cells.size());
  for (Eigen::Index k = 0; k < ds.K; ++k) {
    for (Eigen::Index t = 0; t < ds.T; ++t) {
      st.a[k][t] = update_a(stats.cov_mean(k, t), st.w[k]);
      for (Eigen::Index l = 0; l < ds.L; ++l) {
        const Eigen::Index i = ds.index(k, t, l);
        st.s_hat[i] = st.w[k].adjoint() * ds.cells[i];
        st.sigma2[i] = st.w[k].dot(stats.cov(k, t, l) * st.w[k]).real();
      }
    }
  }
  return st;
}

}  // namespace dive

#endif  // DIVE_SOLVER_HPP
