// Copyright (c) 2026 The cieig developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cieig/matrix.hpp"

namespace cieig {

/// Thin SVD, M = U diag(sigma) V^H with orthonormal U, V columns and
/// nonincreasing singular values.
struct SvdResult {
  ComplexMatrix u;                    // rows x k
  std::vector<double> singular_values;  // k, nonincreasing
  ComplexMatrix v;                    // cols x k

  /// Count of singular values with sigma_i / sigma_1 >= delta.
  /// delta == 0 keeps every strictly positive value.
  index_t rank(double delta) const {
    if (singular_values.empty() || singular_values[0] <= 0.0) return 0;
    const double s1 = singular_values[0];
    index_t r = 0;
    for (double s : singular_values) {
      if (delta > 0.0 ? (s / s1 >= delta) : (s > 0.0)) ++r;
      else break;
    }
    return r;
  }
};

namespace detail {

inline SvdResult svd_tall(ConstMatView m);

}  // namespace detail

/// One-sided Jacobi SVD; robust at the small/medium sizes this library
/// needs. Raises NoConvergence after 30 sweeps, reporting the remaining
/// off-diagonal residual.
inline SvdResult svd(ConstMatView m) {
  if (m.rows >= m.cols) return detail::svd_tall(m);
  // wide: factor the adjoint and swap factors
  SvdResult t = detail::svd_tall(adjoint(m));
  SvdResult out;
  out.u = std::move(t.v);
  out.v = std::move(t.u);
  out.singular_values = std::move(t.singular_values);
  return out;
}

namespace detail {

inline SvdResult svd_tall(ConstMatView m) {
  const index_t rows = m.rows, cols = m.cols;
  ComplexMatrix g = m.to_matrix();
  ComplexMatrix v = ComplexMatrix::identity(cols);

  const double tol = 1e-14;
  const int max_sweeps = 30;
  double off = 0.0;
  bool converged = cols < 2;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    off = 0.0;
    for (index_t p = 0; p + 1 < cols; ++p) {
      for (index_t q = p + 1; q < cols; ++q) {
        cxd* gp = g.col(p);
        cxd* gq = g.col(q);
        double a = 0.0, b = 0.0;
        cxd gamma(0.0);
        for (index_t i = 0; i < rows; ++i) {
          a += std::norm(gp[i]);
          b += std::norm(gq[i]);
          gamma += std::conj(gp[i]) * gq[i];
        }
        const double denom = std::sqrt(a * b);
        const double ga = std::abs(gamma);
        if (denom == 0.0 || ga <= tol * denom) continue;
        off = std::max(off, ga / denom);

        const cxd phase = gamma / ga;
        const double tau = (b - a) / (2.0 * ga);
        const double t = (tau >= 0.0)
                             ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                             : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;

        const cxd spb = s * std::conj(phase);  // applied to the q columns
        for (index_t i = 0; i < rows; ++i) {
          const cxd x = gp[i], y = gq[i];
          gp[i] = c * x - spb * y;
          gq[i] = s * x + c * std::conj(phase) * y;
        }
        cxd* vp = v.col(p);
        cxd* vq = v.col(q);
        for (index_t i = 0; i < cols; ++i) {
          const cxd x = vp[i], y = vq[i];
          vp[i] = c * x - spb * y;
          vq[i] = s * x + c * std::conj(phase) * y;
        }
      }
    }
    converged = off <= tol;
  }
  if (!converged)
    throw NoConvergence("svd: Jacobi sweeps exhausted", 0, off);

  // singular values = column norms, sorted nonincreasing
  std::vector<double> sig(cols);
  for (index_t j = 0; j < cols; ++j) sig[j] = vec_norm(g.col_span(j));
  std::vector<index_t> order(cols);
  std::iota(order.begin(), order.end(), index_t(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](index_t i, index_t j) { return sig[i] > sig[j]; });

  SvdResult out;
  out.u = ComplexMatrix(rows, cols);
  out.v = ComplexMatrix(cols, cols);
  out.singular_values.resize(cols);
  for (index_t j = 0; j < cols; ++j) {
    const index_t src = order[j];
    out.singular_values[j] = sig[src];
    std::copy(g.col(src), g.col(src) + rows, out.u.col(j));
    std::copy(v.col(src), v.col(src) + cols, out.v.col(j));
  }

  // normalize U columns; complete an orthonormal basis over zero columns
  const double s1 = out.singular_values.empty() ? 0.0 : out.singular_values[0];
  const double tiny = (s1 > 0.0) ? s1 * 1e-250 : 0.0;
  for (index_t j = 0; j < cols; ++j) {
    if (out.singular_values[j] > tiny && out.singular_values[j] > 0.0) {
      const double inv = 1.0 / out.singular_values[j];
      cxd* uj = out.u.col(j);
      for (index_t i = 0; i < rows; ++i) uj[i] *= inv;
    } else {
      out.singular_values[j] = 0.0;
      // replace with a unit vector orthogonal to the previous columns
      for (index_t trial = 0; trial < rows; ++trial) {
        std::vector<cxd> e(rows, cxd(0.0));
        e[(j + trial) % rows] = 1.0;
        for (index_t k2 = 0; k2 < j; ++k2) {
          const cxd proj = vec_dot_conj(out.u.col_span(k2), {e.data(), rows});
          const cxd* uk = out.u.col(k2);
          for (index_t i = 0; i < rows; ++i) e[i] -= proj * uk[i];
        }
        const double en = vec_norm(e);
        if (en > 0.5) {
          for (index_t i = 0; i < rows; ++i) out.u(i, j) = e[i] / en;
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace detail

/// Exact spectral norm via the Jacobi SVD (test and verification paths).
inline double norm_two(ConstMatView a) {
  if (a.rows == 0 || a.cols == 0) return 0.0;
  SvdResult s = svd(a);
  return s.singular_values.empty() ? 0.0 : s.singular_values[0];
}

}  // namespace cieig
