// dive/tridiag.hpp
//
// Copyright 2026  dive authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef DIVE_TRIDIAG_HPP
#define DIVE_TRIDIAG_HPP

#include <cmath>
#include <complex>
#include <vector>

#include "dive/types.hpp"

namespace dive {

// Magnitude clipping for estimated off-diagonal correlations: entries with
// |c| > 0.4 are pulled back onto the 0.4 circle, keeping their phase.  The
// threshold guarantees positive definiteness of the unit-diagonal tridiagonal
// matrix built from the result (Gershgorin: row off-diagonal sum <= 0.8).
inline VecC clip_offdiag(const VecC& c_hat) {
  constexpr double kClip = 0.4;
  VecC c = c_hat;
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const double mag = std::abs(c[k]);
    if (mag > kClip) c[k] *= kClip / mag;
  }
  return c;
}

// Hermitian unit-diagonal tridiagonal matrix
//
//       [ 1      c_0                 ]
//   S = [ c_0^*  1    c_1            ]
//       [        ...  ...  c_{K-2}   ]
//       [        c_{K-2}^*  1        ]
//
// with all |c_k| <= 0.4.  Entries of S^{-1} come from the continuant
// (leading/trailing principal minor) recursions
//
//   theta_i = theta_{i-1} - |c_{i-1}|^2 theta_{i-2},   theta_0 = theta_1 = 1,
//   xi_i    = xi_{i+1}    - |c_i|^2    xi_{i+2},       xi_{K+1} = xi_K = 1,
//
// which only involve |c_k|^2 and therefore stay real and positive.  Raw
// continuants underflow for large K (theta_K ~ 0.8^K), so we keep the ratios
// r_i = theta_i/theta_{i-1}.  Starting from r_1 = 1 the recursion
// r_i = 1 - |c_{i-1}|^2 / r_{i-1} is monotone with fixed point 0.8 for the
// worst case |c| = 0.4, hence r_i in [0.8, 1] for every valid instance, and
// log-magnitudes of products of continuants are assembled from prefix sums
// of log r_i.
class TridiagCov {
 public:
  explicit TridiagCov(VecC offdiag) : c_(std::move(offdiag)) {
    const Eigen::Index n = c_.size() + 1;
    for (Eigen::Index k = 0; k < c_.size(); ++k) {
      if (std::abs(c_[k]) > 0.4 + 1e-12)
        throw InvalidParamsError("tridiag off-diagonal exceeds clip threshold");
    }
    // log theta_i, i = 0..K (ltheta_[i] = log theta_i)
    ltheta_.resize(static_cast<std::size_t>(n) + 1, 0.0);
    rtheta_.resize(static_cast<std::size_t>(n) + 1, 1.0);
    for (Eigen::Index i = 2; i <= n; ++i) {
      const double r =
          1.0 - std::norm(c_[i - 2]) / rtheta_[static_cast<std::size_t>(i - 1)];
      if (!(r > 0.0)) throw SingularMatrixError("tridiag continuant collapsed");
      rtheta_[static_cast<std::size_t>(i)] = r;
      ltheta_[static_cast<std::size_t>(i)] =
          ltheta_[static_cast<std::size_t>(i - 1)] + std::log(r);
    }
    // log xi_i, i = 1..K+1 (lxi_[i-1] = log xi_i)
    lxi_.resize(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> rxi(static_cast<std::size_t>(n) + 1, 1.0);
    for (Eigen::Index i = n - 1; i >= 1; --i) {
      const double r =
          1.0 - std::norm(c_[i - 1]) / rxi[static_cast<std::size_t>(i)];
      if (!(r > 0.0)) throw SingularMatrixError("tridiag continuant collapsed");
      rxi[static_cast<std::size_t>(i - 1)] = r;
      lxi_[static_cast<std::size_t>(i - 1)] =
          lxi_[static_cast<std::size_t>(i)] + std::log(r);
    }
  }

  Eigen::Index dim() const { return c_.size() + 1; }
  const VecC& offdiag() const { return c_; }

  // log det S = log theta_K > -inf
  double log_det() const { return ltheta_[static_cast<std::size_t>(dim())]; }

  // (S^{-1})_{ij}, zero-based indices.  Closed form: for i <= j,
  //   (S^{-1})_{ij} = (-1)^{i+j} (prod_{p=i}^{j-1} c_p) theta_i xi_{j+2} / theta_K
  // in zero-based labels; the lower triangle follows by Hermitian symmetry.
  cd inverse_entry(Eigen::Index i, Eigen::Index j) const {
    const Eigen::Index n = dim();
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw ShapeError("tridiag inverse_entry index out of range");
    if (i > j) return std::conj(inverse_entry(j, i));
    double logmag = ltheta_[static_cast<std::size_t>(i)] +
                    lxi_[static_cast<std::size_t>(j + 1)] -
                    ltheta_[static_cast<std::size_t>(n)];
    cd phase = ((j - i) % 2 == 0) ? cd(1.0, 0.0) : cd(-1.0, 0.0);
    for (Eigen::Index p = i; p < j; ++p) {
      const double mag = std::abs(c_[p]);
      if (mag == 0.0) return cd(0.0, 0.0);
      logmag += std::log(mag);
      phase *= c_[p] / mag;
    }
    return phase * std::exp(logmag);
  }

  // Dense S^{-1} with entries beyond |i-j| > k_max zeroed.  k_max = K-1
  // reproduces the full inverse; entries decay like 0.5^{|i-j|} in the worst
  // case, so small k_max is a cheap approximation.
  MatC banded_inverse(Eigen::Index k_max) const {
    const Eigen::Index n = dim();
    if (k_max < 0 || k_max > n - 1)
      throw InvalidParamsError("banded_inverse bandwidth out of range");
    MatC inv = MatC::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index jmax = std::min(n - 1, i + k_max);
      for (Eigen::Index j = i; j <= jmax; ++j) {
        inv(i, j) = inverse_entry(i, j);
        if (j != i) inv(j, i) = std::conj(inv(i, j));
      }
    }
    return inv;
  }

  // x = S^{-1} b by LU elimination without pivoting.  The pivots equal the
  // continuant ratios r_{i+1} >= 0.8, so the factorization is unconditionally
  // stable for clipped instances.
  VecC solve(const VecC& b) const {
    const Eigen::Index n = dim();
    if (b.size() != n) throw ShapeError("tridiag solve size mismatch");
    VecC y(n);
    y[0] = b[0];
    for (Eigen::Index i = 1; i < n; ++i) {
      const double u_prev = rtheta_[static_cast<std::size_t>(i)];
      y[i] = b[i] - std::conj(c_[i - 1]) / u_prev * y[i - 1];
    }
    VecC x(n);
    x[n - 1] = y[n - 1] / rtheta_[static_cast<std::size_t>(n)];
    for (Eigen::Index i = n - 2; i >= 0; --i)
      x[i] = (y[i] - c_[i] * x[i + 1]) / rtheta_[static_cast<std::size_t>(i + 1)];
    return x;
  }

  // Matrix-free product S b (used for residual checks and sampling).
  VecC multiply(const VecC& b) const {
    const Eigen::Index n = dim();
    if (b.size() != n) throw ShapeError("tridiag multiply size mismatch");
    VecC out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      cd v = b[i];
      if (i > 0) v += std::conj(c_[i - 1]) * b[i - 1];
      if (i + 1 < n) v += c_[i] * b[i + 1];
      out[i] = v;
    }
    return out;
  }

  MatC to_dense() const {
    const Eigen::Index n = dim();
    MatC s = MatC::Identity(n, n);
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      s(k, k + 1) = c_[k];
      s(k + 1, k) = std::conj(c_[k]);
    }
    return s;
  }

 private:
  VecC c_;
  std::vector<double> rtheta_;  // rtheta_[i] = theta_i / theta_{i-1}
  std::vector<double> ltheta_;  // ltheta_[i] = log theta_i
  std::vector<double> lxi_;     // lxi_[i-1]  = log xi_i
};

// Spectrum of the constant-|c| instance: 1 + 2|c| cos(k pi / (K+1)), k=1..K.
// With |c| <= 0.4 the smallest eigenvalue stays above 0.2 for every K.
inline VecR eig_constant_c(Eigen::Index K, double c) {
  const double mag = std::abs(c);
  VecR eigs(K);
  for (Eigen::Index k = 1; k <= K; ++k)
    eigs[k - 1] = 1.0 + 2.0 * mag * std::cos(k * M_PI / double(K + 1));
  return eigs;
}

}  // namespace dive

#endif  // DIVE_TRIDIAG_HPP
