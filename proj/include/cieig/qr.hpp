// Copyright (c) 2026 The cieig developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "cieig/matrix.hpp"

namespace cieig {

namespace detail {

/// Deterministic spectral norm estimate: a few power iterations on M^H M.
inline double spectral_norm_estimate(ConstMatView m, int iters = 12) {
  if (m.rows == 0 || m.cols == 0) return 0.0;
  std::vector<cxd> v(m.cols, cxd(1.0));
  double nv = vec_norm(v);
  for (cxd& x : v) x /= nv;
  double sigma = 0.0;
  for (int it = 0; it < iters; ++it) {
    // w = M v
    std::vector<cxd> w(m.rows, cxd(0.0));
    for (index_t j = 0; j < m.cols; ++j) {
      const cxd f = v[j];
      if (f == cxd(0.0)) continue;
      const cxd* mj = m.col(j);
      for (index_t i = 0; i < m.rows; ++i) w[i] += f * mj[i];
    }
    // v = M^H w
    for (index_t j = 0; j < m.cols; ++j) {
      const cxd* mj = m.col(j);
      cxd s(0.0);
      for (index_t i = 0; i < m.rows; ++i) s += std::conj(mj[i]) * w[i];
      v[j] = s;
    }
    const double nv2 = vec_norm(v);
    if (nv2 == 0.0) return 0.0;
    sigma = std::sqrt(nv2);
    for (cxd& x : v) x /= nv2;
  }
  return sigma;
}

}  // namespace detail

/// Householder QR with thin Q (orthonormal columns) and upper triangular R.
/// Raises RankDeficient when a diagonal of R falls below 1e-14 * ||M||_2;
/// callers running block Arnoldi rely on that to detect breakdown.
inline std::pair<ComplexMatrix, ComplexMatrix> qr_orthonormalize(
    ConstMatView m) {
  const index_t rows = m.rows, cols = m.cols;
  if (rows < cols) throw DimensionMismatch("qr_orthonormalize: rows < cols");
  ComplexMatrix a = m.to_matrix();
  const double sigma1 = detail::spectral_norm_estimate(m);
  const double rank_floor = 1e-14 * sigma1;

  std::vector<std::vector<cxd>> reflectors(cols);
  std::vector<cxd> taus(cols);

  for (index_t k = 0; k < cols; ++k) {
    // build reflector for column k below the diagonal
    double xnorm = 0.0;
    for (index_t i = k; i < rows; ++i) xnorm += std::norm(a(i, k));
    xnorm = std::sqrt(xnorm);
    cxd alpha = a(k, k);
    const double aabs = std::abs(alpha);
    cxd beta;  // new diagonal value, = -phase(alpha) * xnorm
    if (aabs == 0.0)
      beta = cxd(-xnorm, 0.0);
    else
      beta = -(alpha / aabs) * xnorm;

    std::vector<cxd>& v = reflectors[k];
    v.assign(rows - k, cxd(0.0));
    cxd tau(0.0);
    if (xnorm > 0.0 && alpha != beta) {
      v[0] = alpha - beta;
      for (index_t i = k + 1; i < rows; ++i) v[i - k] = a(i, k);
      const double vn = vec_norm(v);
      for (cxd& x : v) x /= vn;
      tau = cxd(2.0);  // using normalized v: H = I - 2 v v^H
    }
    taus[k] = tau;

    // apply H to trailing columns (including column k)
    if (tau != cxd(0.0)) {
      for (index_t j = k; j < cols; ++j) {
        cxd s(0.0);
        for (index_t i = k; i < rows; ++i) s += std::conj(v[i - k]) * a(i, j);
        s *= tau;
        for (index_t i = k; i < rows; ++i) a(i, j) -= s * v[i - k];
      }
    }
    if (std::abs(a(k, k)) <= rank_floor)
      throw RankDeficient("qr_orthonormalize: R diagonal below threshold", k);
  }

  // R = leading cols x cols upper triangle
  ComplexMatrix r(cols, cols);
  for (index_t j = 0; j < cols; ++j)
    for (index_t i = 0; i <= j; ++i) r(i, j) = a(i, j);

  // Q = H_0 H_1 ... H_{cols-1} * [I; 0]
  ComplexMatrix q(rows, cols);
  for (index_t j = 0; j < cols; ++j) q(j, j) = 1.0;
  for (index_t k = cols; k-- > 0;) {
    if (taus[k] == cxd(0.0)) continue;
    const std::vector<cxd>& v = reflectors[k];
    for (index_t j = 0; j < cols; ++j) {
      cxd s(0.0);
      for (index_t i = k; i < rows; ++i) s += std::conj(v[i - k]) * q(i, j);
      s *= taus[k];
      for (index_t i = k; i < rows; ++i) q(i, j) -= s * v[i - k];
    }
  }
  return {std::move(q), std::move(r)};
}

}  // namespace cieig
