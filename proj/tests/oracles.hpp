// Shared numerical oracles for the test suite.  Everything here is computed
// by an independent route (finite differences, dense linear algebra) so the
// library results have something external to agree with.

#ifndef DIVE_TESTS_ORACLES_HPP
#define DIVE_TESTS_ORACLES_HPP

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "dive/types.hpp"

namespace oracles {

using dive::cd;
using dive::MatC;
using dive::VecC;

// Gradient of a real functional of a complex vector in the conjugate sense:
// grad_i = (df/dRe w_i + i df/dIm w_i) / 2, by central differences.
template <class F>
VecC fd_grad(F f, VecC w, double h = 1e-6) {
  VecC g = VecC::Zero(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    for (int mode = 0; mode < 2; ++mode) {
      VecC e = VecC::Zero(w.size());
      e[i] = (mode == 0) ? cd(h, 0) : cd(0, h);
      const double df = (f(w + e) - f(w - e)) / (2 * h);
      g[i] += (mode == 0) ? cd(0.5 * df, 0) : cd(0, 0.5 * df);
    }
  }
  return g;
}

// Jacobians of a complex vector field g(w) in the two Wirtinger senses:
// h2(i,j) = d g_j / d w_i and h1(i,j) = d conj(g_j) / d w_i, both as
// (d/dRe - i d/dIm)/2 central differences.
template <class G>
std::pair<MatC, MatC> fd_jacobians(G g, VecC w, double h = 1e-6) {
  const Eigen::Index d = w.size();
  MatC h1(d, d), h2(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    VecC er = VecC::Zero(d);
    er[i] = cd(h, 0);
    VecC ei = VecC::Zero(d);
    ei[i] = cd(0, h);
    const VecC gpr = g(w + er), gmr = g(w - er);
    const VecC gpi = g(w + ei), gmi = g(w - ei);
    const VecC dre = (gpr - gmr) / (2 * h);
    const VecC dim = (gpi - gmi) / (2 * h);
    const VecC drec = (gpr.conjugate() - gmr.conjugate()) / (2 * h);
    const VecC dimc = (gpi.conjugate() - gmi.conjugate()) / (2 * h);
    for (Eigen::Index j = 0; j < d; ++j) {
      h2(i, j) = 0.5 * (dre[j] - cd(0, 1) * dim[j]);
      h1(i, j) = 0.5 * (drec[j] - cd(0, 1) * dimc[j]);
    }
  }
  return {h1, h2};
}

// Score implied by a model's own log density: phi_k = -d log f / d u_k in the
// Wirtinger sense, by central differences on one sample column.  Ties the two
// member functions together so neither can drift.
template <class Model>
VecC fd_density_score(const Model& m, const VecC& s, double h = 1e-6) {
  const Eigen::Index K = s.size();
  auto lf = [&](const VecC& v) {
    MatC col(K, 1);
    col.col(0) = v;
    return m.log_density(col)[0];
  };
  VecC phi(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    VecC er = s, em = s, ei = s, eim = s;
    er[k] += cd(h, 0);
    em[k] -= cd(h, 0);
    ei[k] += cd(0, h);
    eim[k] -= cd(0, h);
    const double dre = (lf(er) - lf(em)) / (2 * h);
    const double dim = (lf(ei) - lf(eim)) / (2 * h);
    phi[k] = 0.5 * cd(-dre, dim);
  }
  return phi;
}

// Conjugate-sense derivative d phi_k / d s_k^* of a score component at one
// sample, for a model whose score acts columnwise.
template <class Score>
cd fd_score_conj_derivative(Score phi, const VecC& s, Eigen::Index k,
                            double h = 1e-6) {
  VecC er = s, ei = s;
  er[k] += cd(h, 0);
  ei[k] += cd(0, h);
  VecC em = s, eim = s;
  em[k] -= cd(h, 0);
  eim[k] -= cd(0, h);
  const cd dre = (phi(er)[k] - phi(em)[k]) / (2 * h);
  const cd dim = (phi(ei)[k] - phi(eim)[k]) / (2 * h);
  return 0.5 * (dre + cd(0, 1) * dim);
}

// Dense Hermitian tridiagonal matrix with unit diagonal from its first
// off-diagonal; the reference for everything the O(K) routines compute.
inline MatC dense_tridiag(const VecC& c) {
  const Eigen::Index n = c.size() + 1;
  MatC m = MatC::Identity(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    m(k, k + 1) = c[k];
    m(k + 1, k) = std::conj(c[k]);
  }
  return m;
}

// Exact-sample-statistics colouring: returns samples whose *sample*
// covariance equals target exactly (up to round-off), by whitening with the
// Cholesky factor of the sample covariance and re-colouring.
inline MatC match_cov(const MatC& x, const MatC& target) {
  const MatC c = (x * x.adjoint()) / double(x.cols());
  const Eigen::LLT<MatC> lx(c), lt(target);
  return lt.matrixL() * lx.matrixL().solve(x);
}

}  // namespace oracles

#endif  // DIVE_TESTS_ORACLES_HPP
