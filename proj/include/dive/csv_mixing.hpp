// dive/csv_mixing.hpp
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
#include <utility>
#include <vector>

#include "dive/rng.hpp"
#include "dive/segmented_data.hpp"
#include "dive/types.hpp"

namespace dive {

// Parameters of one mixing state under the constant-separating-vector model.
// The separating vector w = [beta; h] stays fixed while the mixing vector
// a = [gamma; g] may change from one time segment (and dataset) to the next.
// Consistency requires w^H a = conj(beta)*gamma + h^H g = 1.
struct MixingParams {
  cd beta{};
  VecC h;  // d-1 entries
  cd gamma{};
  VecC g;  // d-1 entries

  Eigen::Index dim() const { return h.size() + 1; }
};

inline VecC separating_vector(const MixingParams& p) {
  VecC w(p.dim());
  w(0) = p.beta;
  w.tail(p.h.size()) = p.h;
  return w;
}

inline VecC mixing_vector(const MixingParams& p) {
  VecC a(p.dim());
  a(0) = p.gamma;
  a.tail(p.g.size()) = p.g;
  return a;
}

inline cd constraint_residual(const MixingParams& p) {
  return std::conj(p.beta) * p.gamma + p.h.dot(p.g) - 1.0;
}

namespace detail {
inline void check_params(const MixingParams& p, const char* where) {
  if (p.h.size() != p.g.size() || p.h.size() < 1)
    throw ShapeError(std::string(where) + ": h and g must match, d >= 2");
  if (std::abs(constraint_residual(p)) > 1e-9)
    throw InvalidParamsError(std::string(where) +
                             ": conj(beta)*gamma + h^H g != 1");
  if (p.gamma == cd(0.0, 0.0))
    throw InvalidParamsError(std::string(where) + ": gamma must be nonzero");
}
}  // namespace detail

// A = [gamma, h^H; g, (g h^H - I)/gamma].  Its first column is the mixing
// vector a and its inverse is the demixing matrix below.
inline MatC build_mixing(const MixingParams& p) {
  detail::check_params(p, "build_mixing");
  const Eigen::Index d = p.dim();
  MatC A(d, d);
  A(0, 0) = p.gamma;
  A.row(0).tail(d - 1) = p.h.adjoint();
  A.col(0).tail(d - 1) = p.g;
  A.bottomRightCorner(d - 1, d - 1) =
      (p.g * p.h.adjoint() - MatC::Identity(d - 1, d - 1)) / p.gamma;
  return A;
}

// W = [conj(beta), h^H; g, -gamma I].  Row one extracts the source of
// interest (it is w^H), the remaining rows extract the background.
inline MatC build_demixing(const MixingParams& p) {
  detail::check_params(p, "build_demixing");
  const Eigen::Index d = p.dim();
  MatC W(d, d);
  W(0, 0) = std::conj(p.beta);
  W.row(0).tail(d - 1) = p.h.adjoint();
  W.col(0).tail(d - 1) = p.g;
  W.bottomRightCorner(d - 1, d - 1) =
      -p.gamma * MatC::Identity(d - 1, d - 1);
  return W;
}

// det W = (-1)^(d-1) gamma^(d-2); nonzero whenever gamma is, so the demixing
// matrix never degenerates inside the feasible parameter set.
inline cd demixing_det(const MixingParams& p) {
  const Eigen::Index d = p.dim();
  const double sign = (d % 2 == 0) ? -1.0 : 1.0;
  return sign * std::pow(p.gamma, static_cast<int>(d) - 2);
}

// Background selector [g, -gamma I] written in terms of the mixing vector
// alone: B a = 0 by construction, so B annihilates the source of interest
// regardless of how a was produced.
inline MatC background_from_a(const VecC& a) {
  const Eigen::Index d = a.size();
  if (d < 2) throw ShapeError("background_from_a: need d >= 2");
  MatC B(d - 1, d);
  B.col(0) = a.tail(d - 1);
  B.rightCols(d - 1) = -a(0) * MatC::Identity(d - 1, d - 1);
  return B;
}

// x_{k,t,l} = A_{k,t} u_{k,t,l}.  Channel 1 of the source tensor carries the
// source of interest, the remaining channels the background.
inline SegmentedDataset mix(const std::vector<std::vector<MixingParams>>& params,
                            const SegmentedDataset& sources) {
  if (static_cast<int>(params.size()) != sources.K)
    throw ShapeError("mix: dataset count mismatch");
  SegmentedDataset out = sources;
  for (int k = 0; k < sources.K; ++k) {
    if (static_cast<int>(params[k].size()) != sources.T)
      throw ShapeError("mix: segment count mismatch");
    for (int t = 0; t < sources.T; ++t) {
      const MatC A = build_mixing(params[k][t]);
      if (A.rows() != sources.d) throw ShapeError("mix: dimension mismatch");
      for (int l = 0; l < sources.L; ++l)
        out.cell(k, t, l) = A * sources.cell(k, t, l);
    }
  }
  return out;
}

// Random mixing states sharing one separating vector.  The first segment
// draws h, g from the circular unit Gaussian and gamma re-drawn until
// |gamma| >= gamma_min, then derives beta from the constraint.  Later
// segments keep (beta, h) and draw fresh g, deriving gamma and rejecting
// draws whose |gamma| falls below gamma_min, so every state stays away from
// the parameterization's singular surface.
inline std::pair<VecC, std::vector<MixingParams>> random_csv_sequence(
    Eigen::Index d, int T, std::mt19937_64& gen, double gamma_min = 0.3) {
  if (d < 2) throw ShapeError("random_csv_sequence: need d >= 2");
  if (T < 1) throw ShapeError("random_csv_sequence: need T >= 1");

  std::vector<MixingParams> seq;
  seq.reserve(T);
  MixingParams first;
  first.h = cnormal_vector(d - 1, gen);
  first.g = cnormal_vector(d - 1, gen);
  do {
    first.gamma = draw_cnormal(gen);
  } while (std::abs(first.gamma) < gamma_min);
  first.beta = std::conj((1.0 - first.h.dot(first.g)) / first.gamma);
  seq.push_back(first);

  for (int t = 1; t < T; ++t) {
    MixingParams p;
    p.beta = first.beta;
    p.h = first.h;
    for (int tries = 0;; ++tries) {
      p.g = cnormal_vector(d - 1, gen);
      p.gamma = (1.0 - p.h.dot(p.g)) / std::conj(p.beta);
      if (std::abs(p.gamma) >= gamma_min) break;
      if (tries > 256)
        throw InvalidParamsError("random_csv_sequence: rejection stalled");
    }
    seq.push_back(std::move(p));
  }
  return {separating_vector(first), seq};
}

}  // namespace dive
