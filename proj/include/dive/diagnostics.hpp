// dive/diagnostics.hpp
//
// Copyright 2026  dive authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Contrast evaluation and full-Hessian assemblies.  Nothing here runs inside
// the extraction loop; these exist so tests can pin the analytic gradients
// and Hessians against finite differences, and so experiments can trace the
// contrast value if desired.

#ifndef DIVE_DIAGNOSTICS_HPP
#define DIVE_DIAGNOSTICS_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "dive/csv_mixing.hpp"
#include "dive/segmented_data.hpp"
#include "dive/solver.hpp"
#include "dive/source_model.hpp"
#include "dive/types.hpp"

namespace dive {
namespace diag {

// Finite-difference checks need the model state held fixed while w moves, so
// everything below obtains its per-cell model through a provider: either
// refitted from the current normalized samples or frozen at a base point.
using ModelProvider = std::function<std::shared_ptr<const SourceModel>(
    Eigen::Index t, Eigen::Index l, const MatC& u)>;

inline ModelProvider fitted_provider(ModelBuilder build) {
  return [build = std::move(build)](Eigen::Index, Eigen::Index,
                                    const MatC& u) {
    return std::shared_ptr<const SourceModel>(build(u));
  };
}

inline ModelProvider frozen_provider(
    std::vector<std::shared_ptr<const SourceModel>> models, Eigen::Index L) {
  return [models = std::move(models), L](Eigen::Index t, Eigen::Index l,
                                         const MatC&) {
    return models.at(static_cast<std::size_t>(t * L + l));
  };
}

namespace detail {

// Per-cell working set shared by the diagnostics: normalized samples of all
// K SOI estimates plus each dataset's variance and per-cell mixing vector.
struct CellEval {
  MatC u;                    // K x Ns
  std::vector<double> sigma2;
  std::vector<VecC> a_l;     // C_l w / sigma2 per k
};

inline CellEval eval_cell(const SegmentedDataset& ds, const BlockStats& stats,
                          const std::vector<VecC>& w, Eigen::Index t,
                          Eigen::Index l) {
  CellEval ce;
  ce.u.resize(ds.K, ds.Ns);
  ce.sigma2.resize(static_cast<std::size_t>(ds.K));
  ce.a_l.resize(static_cast<std::size_t>(ds.K));
  for (Eigen::Index k = 0; k < ds.K; ++k) {
    const MatC& c = stats.cov(k, t, l);
    const double s2 = w[k].dot(c * w[k]).real();
    if (!(s2 > 0))
      throw DegenerateStatError("SOI estimate has non-positive variance");
    ce.sigma2[static_cast<std::size_t>(k)] = s2;
    ce.u.row(k) = (w[k].adjoint() * ds.cell(k, t, l)) / std::sqrt(s2);
    ce.a_l[static_cast<std::size_t>(k)] = c * w[k] / s2;
  }
  return ce;
}

}  // namespace detail

struct ContrastTerms {
  double density = 0;      // < E[log f] >
  double variance = 0;     // -< sum_k log sigma2 >
  double background = 0;   // -< sum_k E[z^H R z] >
  double gain = 0;         // < sum_k (d-2) log |gamma|^2 >_t
  double total() const { return density + variance + background + gain; }
};

// Full contrast value at w, with the dependent mixing vector taken from the
// block-orthogonality constraint and R_{k,t} the inverse of the block-mean
// background covariance.
inline ContrastTerms contrast_eval(const SegmentedDataset& ds,
                                   const BlockStats& stats,
                                   const ModelProvider& provider,
                                   const std::vector<VecC>& w) {
  const Eigen::Index K = ds.K, T = ds.T, L = ds.L, d = ds.d;
  ContrastTerms out;
  for (Eigen::Index t = 0; t < T; ++t) {
    std::vector<MatC> r(static_cast<std::size_t>(K));
    std::vector<MatC> b(static_cast<std::size_t>(K));
    for (Eigen::Index k = 0; k < K; ++k) {
      const VecC a = update_a(stats.cov_mean(k, t), w[k]);
      b[k] = background_from_a(a);
      MatC cz = b[k] * stats.cov_mean(k, t) * b[k].adjoint();
      cz = 0.5 * (cz + cz.adjoint()).eval();
      Eigen::SelfAdjointEigenSolver<MatC> es(cz);
      if (es.eigenvalues()(0) <=
          1e-12 * std::max(es.eigenvalues()(d - 2), 1.0))
        throw SingularMatrixError("background covariance is singular");
      r[k] = es.eigenvectors() *
             es.eigenvalues().cwiseInverse().asDiagonal() *
             es.eigenvectors().adjoint();
      if (d > 2)
        out.gain += (double(d) - 2.0) * std::log(std::norm(a[0])) / double(T);
    }
    for (Eigen::Index l = 0; l < L; ++l) {
      const auto ce = detail::eval_cell(ds, stats, w, t, l);
      const auto model = provider(t, l, ce.u);
      out.density += model->log_density(ce.u).mean() / double(T * L);
      for (Eigen::Index k = 0; k < K; ++k) {
        out.variance -= std::log(ce.sigma2[k]) / double(T * L);
        const MatC cz_l =
            b[k] * stats.cov(k, t, l) * b[k].adjoint();
        out.background -= (r[k] * cz_l).trace().real() / double(T * L);
      }
    }
  }
  return out;
}

// Gradient of the density + variance terms of the contrast, with the model
// states supplied by the provider.  The per-cell normalization uses the
// empirical nu of the provided model at the current point, which is what the
// analytic derivative of those two terms works out to:
//   < -E[phi_k x]/sigma + (Re nu_emp) a_l - a_l >_{l,t} .
inline std::vector<VecC> first_terms_gradient(const SegmentedDataset& ds,
                                              const BlockStats& stats,
                                              const ModelProvider& provider,
                                              const std::vector<VecC>& w) {
  std::vector<VecC> g(static_cast<std::size_t>(ds.K), VecC::Zero(ds.d));
  for (Eigen::Index t = 0; t < ds.T; ++t) {
    for (Eigen::Index l = 0; l < ds.L; ++l) {
      const auto ce = detail::eval_cell(ds, stats, w, t, l);
      const auto model = provider(t, l, ce.u);
      const MatC phi = model->score(ce.u);
      for (Eigen::Index k = 0; k < ds.K; ++k) {
        const cd nu_emp =
            (phi.row(k).array() * ce.u.row(k).array()).mean();
        const VecC ephix = (ds.cell(k, t, l) * phi.row(k).transpose()) /
                           (double(ds.Ns) * std::sqrt(ce.sigma2[k]));
        g[k] += (-ephix + (nu_emp.real() - 1.0) * ce.a_l[k]) /
                double(ds.T * ds.L);
      }
    }
  }
  return g;
}

// Normalized gradient with explicit control over what is held fixed: model
// states always come from the provider; nu per cell is either frozen
// (frozen_nu indexed t*L+l, one K-vector per cell) or taken from the model;
// the dependent vector a is either frozen per (k,t) or recomputed from w.
inline std::vector<VecC> normalized_gradient(
    const SegmentedDataset& ds, const BlockStats& stats,
    const ModelProvider& provider, const std::vector<VecC>& w,
    const std::vector<VecC>* frozen_nu = nullptr,
    const std::vector<std::vector<VecC>>* frozen_a = nullptr) {
  std::vector<VecC> g(static_cast<std::size_t>(ds.K), VecC::Zero(ds.d));
  for (Eigen::Index t = 0; t < ds.T; ++t) {
    std::vector<VecC> a(static_cast<std::size_t>(ds.K));
    for (Eigen::Index k = 0; k < ds.K; ++k)
      a[k] = frozen_a ? (*frozen_a)[k][t]
                      : update_a(stats.cov_mean(k, t), w[k]);
    for (Eigen::Index l = 0; l < ds.L; ++l) {
      const auto ce = detail::eval_cell(ds, stats, w, t, l);
      const auto model = provider(t, l, ce.u);
      const MatC phi = model->score(ce.u);
      const VecC nu = frozen_nu ? (*frozen_nu)[t * ds.L + l] : model->nu();
      for (Eigen::Index k = 0; k < ds.K; ++k) {
        const VecC ephix = (ds.cell(k, t, l) * phi.row(k).transpose()) /
                           (double(ds.Ns) * std::sqrt(ce.sigma2[k]));
        g[k] += (a[k] - ephix / nu[k]) / double(ds.T * ds.L);
      }
    }
  }
  return g;
}

struct HessianPair {
  MatC h1_conj;  // conjugate of d(grad^H)/dw
  MatC h2;       // d(grad^T)/dw
};

// Full-Hessian assemblies including the rank-one terms the runtime update
// drops.  With dependent_a = false, nu and a are treated as constants (their
// values taken at the evaluation point); with dependent_a = true, a carries
// its block-orthogonality dependence on w, which adds -a a^T to h1_conj and
// <C>^*/<sigma2> - a^* a^T to h2 through the stats tau = eta + xi + nu and
// omega = xi + nu - rho.
inline std::vector<HessianPair> full_hessians(const SegmentedDataset& ds,
                                               const BlockStats& stats,
                                               const ModelProvider& provider,
                                               const std::vector<VecC>& w,
                                               const std::vector<VecC>& nu_frozen,
                                               bool dependent_a) {
  const Eigen::Index K = ds.K, d = ds.d;
  std::vector<HessianPair> out(static_cast<std::size_t>(K));
  for (auto& hp : out) {
    hp.h1_conj = MatC::Zero(d, d);
    hp.h2 = MatC::Zero(d, d);
  }
  for (Eigen::Index t = 0; t < ds.T; ++t) {
    std::vector<VecC> a(static_cast<std::size_t>(K));
    for (Eigen::Index k = 0; k < K; ++k) {
      a[k] = update_a(stats.cov_mean(k, t), w[k]);
      if (dependent_a) {
        // the -a^* a^T part of the dependence enters through omega below
        const double sbar2 = w[k].dot(stats.cov_mean(k, t) * w[k]).real();
        out[k].h2 += stats.cov_mean(k, t).conjugate() / sbar2 / double(ds.T);
        out[k].h1_conj -= a[k] * a[k].transpose() / double(ds.T);
      }
    }
    for (Eigen::Index l = 0; l < ds.L; ++l) {
      const auto ce = detail::eval_cell(ds, stats, w, t, l);
      const auto model = provider(t, l, ce.u);
      const VecC rho = model->rho();
      const VecC xi = model->xi(ce.u);
      const VecC eta = model->eta(ce.u);
      const VecC& nu = nu_frozen.at(static_cast<std::size_t>(t * ds.L + l));
      for (Eigen::Index k = 0; k < K; ++k) {
        const cd tau = eta[k] + xi[k] + nu[k];
        const cd coef_a = dependent_a ? (xi[k] + nu[k] - rho[k]) : (xi[k] - rho[k]);
        const VecC& al = ce.a_l[static_cast<std::size_t>(k)];
        out[k].h2 +=
            (-(rho[k] / (nu[k] * ce.sigma2[k])) *
                 stats.cov(k, t, l).conjugate() -
             ((coef_a / nu[k]) * a[k].conjugate() -
              (tau / (2.0 * nu[k])) * al.conjugate()) *
                 a[k].transpose()) /
            double(ds.T * ds.L);
        out[k].h1_conj += (((tau / (2.0 * nu[k])) * al -
                            (eta[k] / nu[k]) * a[k]) *
                           a[k].transpose()) /
                          double(ds.T * ds.L);
      }
    }
  }
  return out;
}

}  // namespace diag
}  // namespace dive

#endif  // DIVE_DIAGNOSTICS_HPP
