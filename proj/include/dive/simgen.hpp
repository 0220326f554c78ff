// dive/simgen.hpp
//
// Copyright 2026  dive authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "dive/csv_mixing.hpp"
#include "dive/rng.hpp"
#include "dive/segmented_data.hpp"
#include "dive/tridiag.hpp"
#include "dive/types.hpp"

namespace dive {

// How the K source-of-interest streams are tied together across datasets.
// kNone keeps them independent; kDependent premultiplies them by one random
// circular-Gaussian K x K matrix so the components become dependent and
// correlated; kTridiag colors unit-variance streams by the Cholesky factor of
// a constant-0.3 tridiagonal covariance, emulating the correlation of
// adjacent frequency bands in a frequency-domain separation problem.
enum class Coupling { kNone, kDependent, kTridiag };

struct TrialConfig {
  int K = 1;              // datasets
  int T = 1;              // mixing segments
  int L = 1;              // variance sub-blocks per segment
  Eigen::Index Ns = 100;  // samples per cell
  Eigen::Index d = 2;     // channels
  double c = 1.0;         // generalized-Gaussian shape (c=1 Gaussian)
  cd delta{0.0, 0.0};     // circularity coefficient, |delta| < 1
  double alpha = 0.0;     // nonstationarity exponent (0 = stationary)
  std::uint64_t seed = 0;
  Coupling coupling = Coupling::kNone;
};

// Everything needed to score an extraction against the generating model.
// sources[k] stacks the final (coupled, variance-scaled) source of interest
// in row 0 over the circular unit-Gaussian background in rows 1..d-1, in cell
// order, so cell (t, l) of dataset k is A_{k,t} * sources[k](:, cell cols).
struct GroundTruth {
  std::vector<std::vector<MixingParams>> params;  // [k][t]
  std::vector<VecC> w_star;                       // [k], shared over t
  MatR variances;                                 // T x L profile
  std::vector<MatC> sources;                      // [k], d x (T*L*Ns)
  VecR soi_scale;  // per-k power factor introduced by the coupling
};

// sigma^2(t, l) = [sin(t pi / (T+1)) sin(l pi / (L+1))]^alpha with 1-based
// t, l; alpha = 0 gives the stationary all-ones profile.
inline MatR variance_profile(int T, int L, double alpha) {
  if (T < 1 || L < 1) throw ShapeError("variance_profile: T, L >= 1");
  if (!(alpha >= 0.0))
    throw InvalidParamsError("variance_profile: alpha must be >= 0");
  MatR grid(T, L);
  for (int t = 0; t < T; ++t)
    for (int l = 0; l < L; ++l) {
      const double st = std::sin((t + 1) * std::numbers::pi / (T + 1));
      const double sl = std::sin((l + 1) * std::numbers::pi / (L + 1));
      grid(t, l) = std::pow(st * sl, alpha);
    }
  return grid;
}

// Unit-variance complex generalized-Gaussian samples with circularity
// coefficient delta.  A circular draw z = sqrt(alpha_c g^{1/c}) e^{i theta},
// g ~ Gamma(1/c, 1), is made non-circular through s = a z + b conj(z) with
// a^2 + b^2 = 1 and 2ab = |delta|, then rotated by half the phase of delta.
// The transform keeps E|s|^2 = 1 and E[s^2] = delta for every shape c.
inline VecC sample_cggd(Eigen::Index n, double c, cd delta,
                        std::mt19937_64& gen) {
  if (n < 0) throw ShapeError("sample_cggd: negative length");
  if (!(c > 0.0)) throw InvalidParamsError("sample_cggd: shape c must be > 0");
  const double ad = std::abs(delta);
  if (ad >= 1.0)
    throw InvalidParamsError("sample_cggd: |delta| = 1 is degenerate");

  const double alpha_c = std::tgamma(1.0 / c) / std::tgamma(2.0 / c);
  std::gamma_distribution<double> gamma(1.0 / c, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * std::numbers::pi);
  const double a = 0.5 * (std::sqrt(1.0 + ad) + std::sqrt(1.0 - ad));
  const double b = 0.5 * (std::sqrt(1.0 + ad) - std::sqrt(1.0 - ad));
  const cd half_phase = std::polar(1.0, 0.5 * std::arg(delta));

  VecC s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double g = gamma(gen);
    const double theta = unif(gen);
    const cd z = std::sqrt(alpha_c * std::pow(g, 1.0 / c)) *
                 std::polar(1.0, theta);
    s(i) = half_phase * (a * z + b * std::conj(z));
  }
  return s;
}

namespace detail {

// Unit-modulus mixing vectors a_{k,t} (one column per segment) plus the
// minimum-norm w with w^H a_t = 1 for all t: w = A (A^H A)^{-1} 1.  Unit
// phases make every channel of the mixed source-of-interest image have the
// same power as the unit background, so the input signal-to-interference
// ratio is approximately constant across channels.  Draws whose Gram matrix
// is poorly conditioned are rejected; past the conditioning gate the
// constraint residual stays well below the mixing-parameter tolerance.
inline std::pair<MatC, VecC> shared_vector_mixing(Eigen::Index d, int T,
                                                  std::mt19937_64& gen) {
  if (T > d)
    throw InvalidParamsError(
        "generate_trial: need T <= d for a shared separating vector");
  std::uniform_real_distribution<double> unif(0.0, 2.0 * std::numbers::pi);
  for (int tries = 0; tries < 256; ++tries) {
    MatC A(d, T);
    for (int t = 0; t < T; ++t)
      for (Eigen::Index r = 0; r < d; ++r)
        A(r, t) = std::polar(1.0, unif(gen));
    const MatC gram = A.adjoint() * A;
    Eigen::SelfAdjointEigenSolver<MatC> eig(gram);
    const double lmin = eig.eigenvalues().minCoeff();
    const double lmax = eig.eigenvalues().maxCoeff();
    if (!(lmin > 0.0) || lmax >= 1e6 * lmin) continue;
    const VecC y = gram.llt().solve(VecC::Ones(T));
    return {A, A * y};
  }
  throw InvalidParamsError("generate_trial: mixing draw stalled");
}

}  // namespace detail

// Draws one synthetic trial: nonstationary generalized-Gaussian sources of
// interest, circular unit-Gaussian backgrounds, and per-segment mixing that
// shares one separating vector per dataset.  All randomness derives from
// cfg.seed through per-purpose, per-cell streams, so regeneration is
// bit-identical regardless of evaluation order.
inline std::pair<SegmentedDataset, GroundTruth> generate_trial(
    const TrialConfig& cfg) {
  if (cfg.K < 1 || cfg.T < 1 || cfg.L < 1 || cfg.Ns < 1)
    throw ShapeError("generate_trial: dimensions must be positive");
  if (cfg.d < 2) throw ShapeError("generate_trial: need d >= 2");

  const StreamRng root(cfg.seed);
  const Eigen::Index N =
      static_cast<Eigen::Index>(cfg.T) * cfg.L * cfg.Ns;

  GroundTruth gt;
  gt.variances = variance_profile(cfg.T, cfg.L, cfg.alpha);
  gt.params.resize(cfg.K);
  gt.w_star.resize(cfg.K);
  gt.soi_scale = VecR::Ones(cfg.K);

  for (int k = 0; k < cfg.K; ++k) {
    auto gen = root.stream({kTagMixing, static_cast<std::uint64_t>(k)});
    auto [A, w] = detail::shared_vector_mixing(cfg.d, cfg.T, gen);
    gt.w_star[k] = w;
    gt.params[k].reserve(cfg.T);
    for (int t = 0; t < cfg.T; ++t) {
      MixingParams p;
      p.beta = w(0);
      p.h = w.tail(cfg.d - 1);
      p.gamma = A(0, t);
      p.g = A.col(t).tail(cfg.d - 1);
      gt.params[k].push_back(std::move(p));
    }
  }

  // Source-of-interest streams, one row per dataset, then the coupling.
  MatC soi(cfg.K, N);
  for (int k = 0; k < cfg.K; ++k)
    for (int t = 0; t < cfg.T; ++t)
      for (int l = 0; l < cfg.L; ++l) {
        auto gen = root.stream({kTagSoi, static_cast<std::uint64_t>(k),
                                static_cast<std::uint64_t>(t),
                                static_cast<std::uint64_t>(l)});
        soi.row(k).segment(
            (static_cast<Eigen::Index>(t) * cfg.L + l) * cfg.Ns, cfg.Ns) =
            sample_cggd(cfg.Ns, cfg.c, cfg.delta, gen).transpose();
      }
  if (cfg.coupling == Coupling::kDependent && cfg.K > 1) {
    auto gen = root.stream({kTagDependence});
    const MatC M = cnormal_matrix(cfg.K, cfg.K, gen);
    soi = (M * soi).eval();
    for (int k = 0; k < cfg.K; ++k) gt.soi_scale(k) = M.row(k).squaredNorm();
  } else if (cfg.coupling == Coupling::kTridiag && cfg.K > 1) {
    const TridiagCov cov(VecC::Constant(cfg.K - 1, cd(0.3, 0.0)));
    const MatC chol = cov.to_dense().llt().matrixL();
    soi = (chol * soi).eval();
    for (int k = 0; k < cfg.K; ++k)
      gt.soi_scale(k) = chol.row(k).squaredNorm();
  }

  SegmentedDataset ds;
  ds.K = cfg.K;
  ds.T = cfg.T;
  ds.L = cfg.L;
  ds.d = cfg.d;
  ds.Ns = cfg.Ns;
  ds.cells.resize(static_cast<std::size_t>(cfg.K) * cfg.T * cfg.L);
  gt.sources.resize(cfg.K);

  for (int k = 0; k < cfg.K; ++k) {
    MatC& src = gt.sources[k];
    src.resize(cfg.d, N);
    for (int t = 0; t < cfg.T; ++t) {
      const MatC A = build_mixing(gt.params[k][t]);
      for (int l = 0; l < cfg.L; ++l) {
        const Eigen::Index off =
            (static_cast<Eigen::Index>(t) * cfg.L + l) * cfg.Ns;
        auto gen = root.stream({kTagBackground, static_cast<std::uint64_t>(k),
                                static_cast<std::uint64_t>(t),
                                static_cast<std::uint64_t>(l)});
        src.block(0, off, 1, cfg.Ns) =
            std::sqrt(gt.variances(t, l)) * soi.row(k).segment(off, cfg.Ns);
        src.block(1, off, cfg.d - 1, cfg.Ns) =
            cnormal_matrix(cfg.d - 1, cfg.Ns, gen);
        ds.cell(k, t, l) = A * src.middleCols(off, cfg.Ns);
      }
    }
  }
  return {std::move(ds), std::move(gt)};
}

// w_star plus a random perturbation drawn orthogonal to it (eps^H w_star = 0)
// and scaled to squared norm mag2 exactly.
inline VecC perturb_init(const VecC& w_star, std::mt19937_64& gen,
                         double mag2 = 0.01) {
  if (w_star.size() < 1 || w_star.norm() == 0.0)
    throw InvalidParamsError("perturb_init: w_star must be nonzero");
  if (!(mag2 >= 0.0)) throw InvalidParamsError("perturb_init: mag2 < 0");
  if (mag2 == 0.0) return w_star;
  if (w_star.size() < 2)
    throw InvalidParamsError(
        "perturb_init: no orthogonal direction exists for d = 1");
  for (int tries = 0; tries < 256; ++tries) {
    VecC eps = cnormal_vector(w_star.size(), gen);
    eps -= w_star * (w_star.dot(eps) / w_star.squaredNorm());
    const double norm = eps.norm();
    if (norm < 1e-8) continue;
    return w_star + eps * (std::sqrt(mag2) / norm);
  }
  throw InvalidParamsError("perturb_init: perturbation draw stalled");
}

}  // namespace dive
