// Copyright (c) 2026 The cieig developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "cieig/matrix.hpp"

namespace cieig {

/// Partially pivoted LU factorization of a square complex matrix,
/// packed L\U plus pivot indices.
struct LuFactorization {
  ComplexMatrix factors;       // unit lower triangle + upper triangle
  std::vector<index_t> pivots; // row swapped with k at step k
  index_t source_dim = 0;
  double recip_cond = 0.0;     // 1-norm reciprocal condition estimate
};

namespace detail {

// Trailing update A22 -= A21 * A12 in column panels; keeps the hot loop
// streaming down columns.
inline void lu_trailing_update(ComplexMatrix& a, index_t k0, index_t kb,
                               index_t n) {
  for (index_t j = k0 + kb; j < n; ++j) {
    cxd* aj = a.col(j);
    for (index_t p = k0; p < k0 + kb; ++p) {
      const cxd f = aj[p];
      if (f == cxd(0.0)) continue;
      const cxd* lp = a.col(p);
      for (index_t i = k0 + kb; i < n; ++i) aj[i] -= f * lp[i];
    }
  }
}

}  // namespace detail

/// Relative pivot threshold: a pivot below eps * max|M| raises SingularMatrix.
inline constexpr double kLuSingularEps = 1e-14;

inline LuFactorization lu_factor(ConstMatView m_in) {
  if (m_in.rows != m_in.cols) throw DimensionMismatch("lu_factor: matrix not square");
  const index_t n = m_in.rows;
  LuFactorization f;
  f.factors = m_in.to_matrix();
  f.pivots.resize(n);
  f.source_dim = n;
  ComplexMatrix& a = f.factors;

  const double scale = norm_max(m_in);
  const double pivot_floor = kLuSingularEps * scale;

  const index_t nb = 48;  // panel width for the trailing update
  for (index_t k0 = 0; k0 < n; k0 += nb) {
    const index_t kb = std::min(nb, n - k0);
    // factor panel columns with partial pivoting over full rows
    for (index_t k = k0; k < k0 + kb; ++k) {
      index_t piv = k;
      double best = std::abs(a(k, k));
      for (index_t i = k + 1; i < n; ++i) {
        const double v = std::abs(a(i, k));
        if (v > best) { best = v; piv = i; }
      }
      if (!(best > pivot_floor))
        throw SingularMatrix("lu_factor: pivot below threshold", k);
      f.pivots[k] = piv;
      if (piv != k)
        for (index_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      const cxd inv = cxd(1.0) / a(k, k);
      cxd* ak = a.col(k);
      for (index_t i = k + 1; i < n; ++i) ak[i] *= inv;
      // update remaining panel columns
      for (index_t j = k + 1; j < k0 + kb; ++j) {
        const cxd fkj = a(k, j);
        if (fkj == cxd(0.0)) continue;
        cxd* aj = a.col(j);
        for (index_t i = k + 1; i < n; ++i) aj[i] -= fkj * ak[i];
      }
    }
    if (k0 + kb < n) {
      // apply panel's L to the right-of-panel block rows k0..k0+kb
      for (index_t j = k0 + kb; j < n; ++j) {
        cxd* aj = a.col(j);
        for (index_t p = k0; p < k0 + kb; ++p) {
          const cxd f2 = aj[p];
          if (f2 == cxd(0.0)) continue;
          const cxd* lp = a.col(p);
          for (index_t i = p + 1; i < k0 + kb; ++i) aj[i] -= f2 * lp[i];
        }
      }
      detail::lu_trailing_update(a, k0, kb, n);
    }
  }

  // 1-norm reciprocal condition estimate (Hager-style power method on M^-1)
  f.recip_cond = [&]() {
    if (n == 0) return 1.0;
    const double m1 = norm_one(m_in);
    if (m1 == 0.0) return 0.0;
    std::vector<cxd> x(n, cxd(1.0 / double(n)));
    double est = 0.0;
    for (int iter = 0; iter < 5; ++iter) {
      // y = M^-1 x
      std::vector<cxd> y = x;
      // forward/back substitution inline (same as lu_solve on one column)
      for (index_t k = 0; k < n; ++k) std::swap(y[k], y[f.pivots[k]]);
      for (index_t k = 0; k < n; ++k) {
        const cxd yk = y[k];
        if (yk == cxd(0.0)) continue;
        const cxd* lk = a.col(k);
        for (index_t i = k + 1; i < n; ++i) y[i] -= yk * lk[i];
      }
      for (index_t kk = n; kk-- > 0;) {
        y[kk] /= a(kk, kk);
        const cxd yk = y[kk];
        if (yk == cxd(0.0)) continue;
        const cxd* uk = a.col(kk);
        for (index_t i = 0; i < kk; ++i) y[i] -= yk * uk[i];
      }
      double y1 = 0.0;
      for (const cxd& v : y) y1 += std::abs(v);
      est = std::max(est, y1);
      // next direction: signs of y
      double ymax = 0.0;
      index_t jmax = 0;
      for (index_t i = 0; i < n; ++i)
        if (std::abs(y[i]) > ymax) { ymax = std::abs(y[i]); jmax = i; }
      std::fill(x.begin(), x.end(), cxd(0.0));
      x[jmax] = cxd(1.0);
      if (iter > 0 && ymax <= est * 1e-2) break;
    }
    const double denom = m1 * est;
    return denom > 0.0 ? 1.0 / denom : 0.0;
  }();

  return f;
}

/// X with M X = RHS via the stored factorization.
inline ComplexMatrix lu_solve(const LuFactorization& f, ConstMatView rhs) {
  const index_t n = f.source_dim;
  if (rhs.rows != n) throw DimensionMismatch("lu_solve: RHS row count mismatch");
  ComplexMatrix x = rhs.to_matrix();
  const ComplexMatrix& a = f.factors;
  for (index_t j = 0; j < x.cols(); ++j) {
    cxd* xj = x.col(j);
    for (index_t k = 0; k < n; ++k) std::swap(xj[k], xj[f.pivots[k]]);
    for (index_t k = 0; k < n; ++k) {
      const cxd xk = xj[k];
      if (xk == cxd(0.0)) continue;
      const cxd* lk = a.col(k);
      for (index_t i = k + 1; i < n; ++i) xj[i] -= xk * lk[i];
    }
    for (index_t kk = n; kk-- > 0;) {
      xj[kk] /= a(kk, kk);
      const cxd xk = xj[kk];
      if (xk == cxd(0.0)) continue;
      const cxd* uk = a.col(kk);
      for (index_t i = 0; i < kk; ++i) xj[i] -= xk * uk[i];
    }
  }
  return x;
}

/// Solve M^T X = RHS (plain transpose, no conjugation).
inline ComplexMatrix lu_solve_transposed(const LuFactorization& f,
                                         ConstMatView rhs) {
  const index_t n = f.source_dim;
  if (rhs.rows != n)
    throw DimensionMismatch("lu_solve_transposed: RHS row count mismatch");
  // M = P^T L U  =>  M^T = U^T L^T P; solve U^T w = b, L^T v = w, x = P^T v
  ComplexMatrix x = rhs.to_matrix();
  const ComplexMatrix& a = f.factors;
  for (index_t j = 0; j < x.cols(); ++j) {
    cxd* xj = x.col(j);
    // U^T is lower triangular with diagonal of U
    for (index_t k = 0; k < n; ++k) {
      const cxd* uk = a.col(k);
      cxd s = xj[k];
      for (index_t i = 0; i < k; ++i) s -= uk[i] * xj[i];
      xj[k] = s / uk[k];
    }
    // L^T is unit upper triangular
    for (index_t kk = n; kk-- > 0;) {
      const cxd* lk = a.col(kk);
      cxd s = xj[kk];
      for (index_t i = kk + 1; i < n; ++i) s -= lk[i] * xj[i];
      xj[kk] = s;
    }
    // undo pivoting: rows were swapped k <-> pivots[k] in order
    for (index_t kk = n; kk-- > 0;) std::swap(xj[kk], xj[f.pivots[kk]]);
  }
  return x;
}

/// Solve X M = RHS, i.e. X = RHS * M^-1.
inline ComplexMatrix lu_solve_right(const LuFactorization& f, ConstMatView rhs) {
  ComplexMatrix xt = lu_solve_transposed(f, transpose(rhs));
  return transpose(xt);
}

}  // namespace cieig
