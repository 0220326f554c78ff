// dive/source_model.hpp
//
// Copyright 2026  dive authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef DIVE_SOURCE_MODEL_HPP
#define DIVE_SOURCE_MODEL_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "dive/segmented_data.hpp"
#include "dive/tridiag.hpp"
#include "dive/types.hpp"

namespace dive {

// A source model fitted to the normalized SOI estimates of one (t,l) cell.
// Input samples are always K x Ns with unit sample variance per row.  The
// model exposes the score phi_k per sample, the normalization nu_k and
// curvature rho_k per component, a per-sample log density (up to model-wide
// constants for the non-Gaussian family), and the second-order sample
// statistics xi_k, eta_k used by the Hessian diagnostics.
class SourceModel {
 public:
  virtual ~SourceModel() = default;

  virtual MatC score(const MatC& u) const = 0;
  virtual VecC nu() const = 0;
  virtual VecC rho() const = 0;
  virtual VecR log_density(const MatC& u) const = 0;
  virtual VecC xi(const MatC& u) const = 0;
  virtual VecC eta(const MatC& u) const = 0;
};

struct ModelOptions {
  double mu = 1e-3;          // diagonal loading, scaled by trace(cov)/K
  bool truncated_score = false;  // tridiagonal model: use banded inverse
  int k_max = 10;                // bandwidth of the truncated inverse
};

namespace detail {

inline RowVecR rati_denominator(const MatC& u) {
  return RowVecR::Ones(u.cols()) + u.cwiseAbs2().colwise().sum();
}

}  // namespace detail

// Rational super-Gaussian score phi_k(s) = s_k^* / (1 + sum_j |s_j|^2).
// nu and rho have no closed form and are estimated from the building
// samples; a vanishing nu would break the normalized gradient, so it is
// rejected here.
class RatiModel final : public SourceModel {
 public:
  explicit RatiModel(const MatC& u) {
    const RowVecR den = detail::rati_denominator(u);
    const MatC phi =
        u.conjugate().array().rowwise() / den.array().cast<cd>();
    nu_ = (phi.array() * u.array()).rowwise().mean();
    const MatR a2 = u.cwiseAbs2();
    const RowVecR den2 = den.cwiseAbs2();
    rho_ = ((a2.array().rowwise() / den2.array()).array() * (-1.0) +
            (1.0 / den.array()).replicate(u.rows(), 1))
               .rowwise()
               .mean()
               .cast<cd>();
    for (Eigen::Index k = 0; k < nu_.size(); ++k) {
      if (std::abs(nu_[k]) < 1e-8)
        throw DegenerateStatError("rati normalization nu is numerically zero");
    }
  }

  MatC score(const MatC& u) const override {
    const RowVecR den = detail::rati_denominator(u);
    return u.conjugate().array().rowwise() / den.array().cast<cd>();
  }

  VecC nu() const override { return nu_; }
  VecC rho() const override { return rho_; }

  VecR log_density(const MatC& u) const override {
    return -detail::rati_denominator(u).array().log().transpose();
  }

  // d phi_k / d s_k^* = 1/D - |s_k|^2/D^2,  d phi_k / d s_k = -(s_k^*)^2/D^2
  VecC xi(const MatC& u) const override {
    const RowVecR den = detail::rati_denominator(u);
    const MatR a2 = u.cwiseAbs2();
    const MatR dconj = (a2.array().rowwise() / den.cwiseAbs2().array()) * (-1.0) +
                       (1.0 / den.array()).replicate(u.rows(), 1);
    return (dconj.array() * a2.array()).rowwise().mean().cast<cd>();
  }

  VecC eta(const MatC& u) const override {
    const RowVecR den2 = detail::rati_denominator(u).cwiseAbs2();
    const MatC us = u.conjugate().cwiseProduct(u.conjugate());
    const MatC u2 = u.cwiseProduct(u);
    return -(us.cwiseProduct(u2).array().rowwise() / den2.array().cast<cd>())
                .rowwise()
                .mean();
  }

 private:
  VecC nu_;
  VecC rho_;
};

// Scalar non-circular Gaussian score on a normalized sample,
// psi(s) = (s^* - delta^* s) / (1 - |delta|^2).
inline cd gauss_score_scalar_noncirc(cd s, cd delta) {
  const double d2 = std::norm(delta);
  if (d2 >= 1.0)
    throw InvalidParamsError("pseudo-correlation magnitude must be < 1");
  return (std::conj(s) - std::conj(delta) * s) / (1.0 - d2);
}

// K = 1 Gaussian model with pseudo-correlation clipping.  The sample
// variance of the (normalized) input is 1 by construction, so the only
// fitted quantity is delta = E[u^2], clipped to magnitude 0.99 because the
// sample estimate can reach 1 at small Ns and 1/(1-|delta|^2) would blow up.
class GaussScalarModel final : public SourceModel {
 public:
  GaussScalarModel(const MatC& u, bool noncircular) {
    if (u.rows() != 1) throw ShapeError("scalar Gaussian model needs K = 1");
    if (noncircular) {
      delta_ = u.cwiseProduct(u).mean();
      const double mag = std::abs(delta_);
      if (mag > 0.99) delta_ *= 0.99 / mag;
    } else {
      delta_ = cd(0.0, 0.0);
    }
  }

  MatC score(const MatC& u) const override {
    const double p = 1.0 - std::norm(delta_);
    return (u.conjugate() - std::conj(delta_) * u) / p;
  }

  VecC nu() const override { return VecC::Ones(1); }

  VecC rho() const override {
    VecC r(1);
    r[0] = cd(1.0 / (1.0 - std::norm(delta_)), 0.0);
    return r;
  }

  VecR log_density(const MatC& u) const override {
    const double p = 1.0 - std::norm(delta_);
    const VecR quad =
        (u.cwiseAbs2().array() -
         (std::conj(delta_) * u.cwiseProduct(u).array()).real())
            .transpose() /
        p;
    return -quad.array() - 0.5 * std::log(p) - std::log(M_PI);
  }

  VecC xi(const MatC& u) const override {
    VecC v(1);
    v[0] = u.cwiseAbs2().mean() / (1.0 - std::norm(delta_));
    return v;
  }

  VecC eta(const MatC& u) const override {
    VecC v(1);
    v[0] = -std::conj(delta_) / (1.0 - std::norm(delta_)) *
           u.cwiseProduct(u).mean();
    return v;
  }

  cd delta() const { return delta_; }

 private:
  cd delta_;
};

// General vector Gaussian model with covariance C = E[uu^H] + loading and,
// when non-circular, pseudo-covariance G = E[uu^T].  With
// P = C^* - G^H C^{-1} G and M = G^H C^{-1}, the score is
//   psi(u) = P^{-1} u^* - (M^T P^{-*} + P^{-1} M)/2 u = G1 u^* - G2 u,
// nu_k = 1 analytically, and rho_k = (P^{-1})_{kk}.
class GaussVectorModel final : public SourceModel {
 public:
  GaussVectorModel(const MatC& u, bool noncircular, double mu) {
    const Eigen::Index K = u.rows();
    MatC sigma = sample_cov(u);
    sigma += (mu * sigma.trace().real() / double(K)) * MatC::Identity(K, K);
    const MatC gamma =
        noncircular ? sample_pcov(u) : MatC::Zero(K, K).eval();

    Eigen::SelfAdjointEigenSolver<MatC> es(sigma);
    const VecR ev = es.eigenvalues();
    if (ev[0] <= 1e-12 * std::max(ev[K - 1], 1.0))
      throw SingularMatrixError(
          "sample covariance is singular; increase the loading mu");
    const MatC sigma_inv = es.eigenvectors() *
                           ev.cwiseInverse().asDiagonal() *
                           es.eigenvectors().adjoint();
    log_det_sigma_ = ev.array().log().sum();

    MatC p = sigma.conjugate() - gamma.adjoint() * sigma_inv * gamma;
    p = 0.5 * (p + p.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<MatC> ep(p);
    const VecR pv = ep.eigenvalues();
    if (pv[0] <= 1e-12 * std::max(pv[K - 1], 1.0))
      throw SingularMatrixError(
          "noncircularity matrix is singular; increase the loading mu");
    g1_ = ep.eigenvectors() * pv.cwiseInverse().asDiagonal() *
          ep.eigenvectors().adjoint();
    log_det_p_ = pv.array().log().sum();

    const MatC m = gamma.adjoint() * sigma_inv;
    g2_ = 0.5 * (m.transpose() * g1_.conjugate() + g1_ * m);
  }

  MatC score(const MatC& u) const override {
    return g1_ * u.conjugate() - g2_ * u;
  }

  VecC nu() const override { return VecC::Ones(g1_.rows()); }
  VecC rho() const override { return g1_.diagonal(); }

  VecR log_density(const MatC& u) const override {
    const Eigen::Index K = g1_.rows();
    // -u^H P^{-*} u + Re(u^T M^T P^{-*} u) reduces to the G1/G2 split below.
    const MatC g1u = g1_.conjugate() * u;
    const VecR quad1 = (u.conjugate().array() * g1u.array())
                           .colwise()
                           .sum()
                           .real()
                           .transpose();
    const MatC g2u = g2_ * u;
    const VecR quad2 =
        (u.array() * g2u.array()).colwise().sum().real().transpose();
    return -quad1.array() + quad2.array() -
           0.5 * (log_det_sigma_ + log_det_p_) - double(K) * std::log(M_PI);
  }

  VecC xi(const MatC& u) const override {
    return g1_.diagonal().array() *
           u.cwiseAbs2().rowwise().mean().array().cast<cd>();
  }

  VecC eta(const MatC& u) const override {
    return -g2_.diagonal().array() *
           u.cwiseProduct(u).rowwise().mean().array();
  }

  const MatC& g1() const { return g1_; }
  const MatC& g2() const { return g2_; }

 private:
  MatC g1_;
  MatC g2_;
  double log_det_sigma_ = 0.0;
  double log_det_p_ = 0.0;
};

// Circular Gaussian model with unit-diagonal tridiagonal covariance.  The
// adjacent-channel correlations c_k = E[u_k u_{k+1}^*] are clipped to
// magnitude 0.4, which keeps the matrix positive definite, and the score
// (S^{-1} u)^* is evaluated either by the exact O(K) solve (default) or by
// multiplication with the banded truncation of S^{-1}.
class GaussTridiagModel final : public SourceModel {
 public:
  GaussTridiagModel(const MatC& u, const ModelOptions& opts)
      : cov_(fit_offdiag(u)),
        truncated_(opts.truncated_score),
        k_max_(std::min<Eigen::Index>(opts.k_max, cov_.dim() - 1)) {
    if (truncated_) banded_ = cov_.banded_inverse(k_max_);
    rho_.resize(cov_.dim());
    for (Eigen::Index k = 0; k < cov_.dim(); ++k)
      rho_[k] = cov_.inverse_entry(k, k);
  }

  MatC score(const MatC& u) const override {
    if (truncated_) return (banded_ * u).conjugate();
    MatC out(u.rows(), u.cols());
    for (Eigen::Index n = 0; n < u.cols(); ++n)
      out.col(n) = cov_.solve(u.col(n)).conjugate();
    return out;
  }

  VecC nu() const override { return VecC::Ones(cov_.dim()); }
  VecC rho() const override { return rho_; }

  VecR log_density(const MatC& u) const override {
    const Eigen::Index K = cov_.dim();
    VecR out(u.cols());
    for (Eigen::Index n = 0; n < u.cols(); ++n) {
      const VecC x = cov_.solve(u.col(n));
      out[n] = -u.col(n).dot(x).real() - cov_.log_det() -
               double(K) * std::log(M_PI);
    }
    return out;
  }

  VecC xi(const MatC& u) const override {
    return rho_.array() * u.cwiseAbs2().rowwise().mean().array().cast<cd>();
  }

  VecC eta(const MatC& u) const override { return VecC::Zero(cov_.dim()); }

  const TridiagCov& cov() const { return cov_; }

 private:
  static TridiagCov fit_offdiag(const MatC& u) {
    const Eigen::Index K = u.rows();
    if (K < 1) throw ShapeError("tridiagonal model needs K >= 1");
    VecC c(K - 1);
    for (Eigen::Index k = 0; k + 1 < K; ++k)
      c[k] = (u.row(k).array() * u.row(k + 1).conjugate().array()).mean();
    return TridiagCov(clip_offdiag(c));
  }

  TridiagCov cov_;
  bool truncated_;
  Eigen::Index k_max_;
  MatC banded_;
  VecC rho_;
};

// Builds a fitted model from one cell of normalized samples.
using ModelBuilder =
    std::function<std::unique_ptr<SourceModel>(const MatC& u)>;

// Model families accepted by the harness: "rati", "gauss" (non-circular,
// scalar fast path at K = 1), "gauss-circ", and "gausstri".
inline ModelBuilder make_model(const std::string& name,
                               ModelOptions opts = {}) {
  if (name == "rati") {
    return [](const MatC& u) -> std::unique_ptr<SourceModel> {
      return std::make_unique<RatiModel>(u);
    };
  }
  if (name == "gauss" || name == "gauss-circ") {
    const bool noncircular = (name == "gauss");
    return [noncircular, opts](const MatC& u) -> std::unique_ptr<SourceModel> {
      if (u.rows() == 1)
        return std::make_unique<GaussScalarModel>(u, noncircular);
      return std::make_unique<GaussVectorModel>(u, noncircular, opts.mu);
    };
  }
  if (name == "gausstri") {
    return [opts](const MatC& u) -> std::unique_ptr<SourceModel> {
      return std::make_unique<GaussTridiagModel>(u, opts);
    };
  }
  throw ConfigError("unknown source model: " + name);
}

}  // namespace dive

#endif  // DIVE_SOURCE_MODEL_HPP
