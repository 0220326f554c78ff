// dive/segmented_data.hpp
//
// Copyright 2026  dive authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <vector>

#include "dive/types.hpp"

namespace dive {

// Multi-dataset observations cut into a T x L grid of blocks.
//
// Dataset k is a d x N matrix of samples; N = T * L * Ns.  The outer index t
// walks the coarse segments on which the mixing may change, the inner index l
// walks sub-blocks on which only the source variance profile may change.
// Cells are stored k-major, then t, then l.
struct SegmentedDataset {
  int K = 0;
  int T = 0;
  int L = 0;
  Eigen::Index d = 0;
  Eigen::Index Ns = 0;
  std::vector<MatC> cells;  // K*T*L entries, each d x Ns

  Eigen::Index N() const { return static_cast<Eigen::Index>(T) * L * Ns; }

  std::size_t index(int k, int t, int l) const {
    return (static_cast<std::size_t>(k) * T + t) * L + l;
  }

  const MatC& cell(int k, int t, int l) const { return cells[index(k, t, l)]; }
  MatC& cell(int k, int t, int l) { return cells[index(k, t, l)]; }
};

// Splits each dataset into T*L equal consecutive blocks.  Block (t, l) of
// dataset k holds columns [(t*L + l)*Ns, (t*L + l + 1)*Ns) of X[k].
inline SegmentedDataset segment(const std::vector<MatC>& X, int T, int L) {
  if (X.empty()) throw ShapeError("segment: no datasets");
  if (T < 1 || L < 1) throw ShapeError("segment: T and L must be positive");
  const Eigen::Index d = X[0].rows();
  const Eigen::Index N = X[0].cols();
  if (d < 1 || N < 1) throw ShapeError("segment: empty dataset");
  if (N % (static_cast<Eigen::Index>(T) * L) != 0)
    throw ShapeError("segment: N not divisible by T*L");
  const Eigen::Index Ns = N / (static_cast<Eigen::Index>(T) * L);

  SegmentedDataset out;
  out.K = static_cast<int>(X.size());
  out.T = T;
  out.L = L;
  out.d = d;
  out.Ns = Ns;
  out.cells.reserve(static_cast<std::size_t>(out.K) * T * L);
  for (const MatC& xk : X) {
    if (xk.rows() != d || xk.cols() != N)
      throw ShapeError("segment: datasets must share dimensions");
    for (int t = 0; t < T; ++t)
      for (int l = 0; l < L; ++l)
        out.cells.push_back(
            xk.middleCols((static_cast<Eigen::Index>(t) * L + l) * Ns, Ns));
  }
  return out;
}

inline SegmentedDataset segment(const MatC& X, int T, int L) {
  return segment(std::vector<MatC>{X}, T, L);
}

// Concatenates the cells of dataset k back into one d x N matrix.
inline MatC flatten(const SegmentedDataset& ds, int k) {
  if (k < 0 || k >= ds.K)
    throw ShapeError("flatten: dataset index out of range");
  MatC X(ds.d, ds.N());
  for (int t = 0; t < ds.T; ++t)
    for (int l = 0; l < ds.L; ++l)
      X.middleCols((static_cast<Eigen::Index>(t) * ds.L + l) * ds.Ns, ds.Ns) =
          ds.cell(k, t, l);
  return X;
}

inline SegmentedDataset select_dataset(const SegmentedDataset& ds, int k) {
  if (k < 0 || k >= ds.K)
    throw ShapeError("select_dataset: dataset index out of range");
  SegmentedDataset out;
  out.K = 1;
  out.T = ds.T;
  out.L = ds.L;
  out.d = ds.d;
  out.Ns = ds.Ns;
  out.cells.assign(ds.cells.begin() + ds.index(k, 0, 0),
                   ds.cells.begin() + ds.index(k, ds.T - 1, ds.L - 1) + 1);
  return out;
}

inline SegmentedDataset resegment(const SegmentedDataset& ds, int T, int L) {
  std::vector<MatC> X;
  X.reserve(ds.K);
  for (int k = 0; k < ds.K; ++k) X.push_back(flatten(ds, k));
  return segment(X, T, L);
}

// (1/Ns) * X X^H, folded to exact Hermitian symmetry.
inline MatC sample_cov(const MatC& X) {
  if (X.cols() < 1) throw ShapeError("sample_cov: empty block");
  MatC C = X * X.adjoint() / static_cast<double>(X.cols());
  return 0.5 * (C + C.adjoint().eval());
}

// (1/Ns) * X X^T, folded to exact (complex) symmetry.
inline MatC sample_pcov(const MatC& X) {
  if (X.cols() < 1) throw ShapeError("sample_pcov: empty block");
  MatC D = X * X.transpose() / static_cast<double>(X.cols());
  return 0.5 * (D + D.transpose().eval());
}

// Per-cell covariance and pseudo-covariance, plus the per-(k, t) average of
// the cell covariances that the separating-vector updates work with.
struct BlockStats {
  int K = 0;
  int T = 0;
  int L = 0;
  Eigen::Index d = 0;
  Eigen::Index Ns = 0;
  std::vector<MatC> C;     // K*T*L
  std::vector<MatC> D;     // K*T*L
  std::vector<MatC> Cbar;  // K*T

  std::size_t index(int k, int t, int l) const {
    return (static_cast<std::size_t>(k) * T + t) * L + l;
  }

  const MatC& cov(int k, int t, int l) const { return C[index(k, t, l)]; }
  const MatC& pcov(int k, int t, int l) const { return D[index(k, t, l)]; }
  const MatC& cov_mean(int k, int t) const {
    return Cbar[static_cast<std::size_t>(k) * T + t];
  }
};

inline BlockStats compute_stats(const SegmentedDataset& ds) {
  BlockStats st;
  st.K = ds.K;
  st.T = ds.T;
  st.L = ds.L;
  st.d = ds.d;
  st.Ns = ds.Ns;
  st.C.reserve(ds.cells.size());
  st.D.reserve(ds.cells.size());
  st.Cbar.reserve(static_cast<std::size_t>(ds.K) * ds.T);
  for (int k = 0; k < ds.K; ++k)
    for (int t = 0; t < ds.T; ++t) {
      MatC acc = MatC::Zero(ds.d, ds.d);
      for (int l = 0; l < ds.L; ++l) {
        st.C.push_back(sample_cov(ds.cell(k, t, l)));
        st.D.push_back(sample_pcov(ds.cell(k, t, l)));
        acc += st.C.back();
      }
      st.Cbar.push_back(acc / static_cast<double>(ds.L));
    }
  return st;
}

}  // namespace dive
