// Copyright (c) 2026 The cieig developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "cieig/lu.hpp"
#include "cieig/matrix.hpp"

namespace cieig {

struct Eigenpair {
  cxd value;
  std::vector<cxd> vector;  // unit 2-norm
};

struct EigOptions {
  index_t max_dim = 4096;       // small-dense cap
  bool with_vectors = true;
  index_t max_iters_per_dim = 100;  // QR iteration budget is 100 * n
};

namespace detail {

// Householder reduction to upper Hessenberg form, accumulating the
// similarity transform: A = Q H Q^H.
inline void hessenberg_reduce(ComplexMatrix& h, ComplexMatrix& q) {
  const index_t n = h.rows();
  q = ComplexMatrix::identity(n);
  if (n < 3) return;
  std::vector<cxd> v;
  for (index_t k = 0; k + 2 < n; ++k) {
    double xnorm = 0.0;
    for (index_t i = k + 1; i < n; ++i) xnorm += std::norm(h(i, k));
    xnorm = std::sqrt(xnorm);
    if (xnorm == 0.0) continue;
    cxd alpha = h(k + 1, k);
    const double aabs = std::abs(alpha);
    const cxd beta = (aabs == 0.0) ? cxd(-xnorm) : -(alpha / aabs) * xnorm;
    v.assign(n - k - 1, cxd(0.0));
    v[0] = alpha - beta;
    for (index_t i = k + 2; i < n; ++i) v[i - k - 1] = h(i, k);
    const double vn = vec_norm(v);
    if (vn == 0.0) continue;
    for (cxd& x : v) x /= vn;
    // H <- P H, rows k+1..n
    for (index_t j = k; j < n; ++j) {
      cxd s(0.0);
      for (index_t i = k + 1; i < n; ++i) s += std::conj(v[i - k - 1]) * h(i, j);
      s *= 2.0;
      for (index_t i = k + 1; i < n; ++i) h(i, j) -= s * v[i - k - 1];
    }
    // H <- H P, columns k+1..n
    for (index_t i = 0; i < n; ++i) {
      cxd s(0.0);
      for (index_t j = k + 1; j < n; ++j) s += h(i, j) * v[j - k - 1];
      s *= 2.0;
      for (index_t j = k + 1; j < n; ++j) h(i, j) -= s * std::conj(v[j - k - 1]);
    }
    // Q <- Q P
    for (index_t i = 0; i < n; ++i) {
      cxd s(0.0);
      for (index_t j = k + 1; j < n; ++j) s += q(i, j) * v[j - k - 1];
      s *= 2.0;
      for (index_t j = k + 1; j < n; ++j) q(i, j) -= s * std::conj(v[j - k - 1]);
    }
    for (index_t i = k + 2; i < n; ++i) h(i, k) = cxd(0.0);
    h(k + 1, k) = beta;
  }
}

inline cxd wilkinson_shift(const ComplexMatrix& h, index_t m) {
  // eigenvalue of the trailing 2x2 closest to h(m,m)
  const cxd a = h(m - 1, m - 1), b = h(m - 1, m), c = h(m, m - 1), d = h(m, m);
  const cxd tr = a + d;
  const cxd det = a * d - b * c;
  const cxd disc = std::sqrt(tr * tr - 4.0 * det);
  const cxd l1 = (tr + disc) / 2.0;
  const cxd l2 = (tr - disc) / 2.0;
  return (std::abs(l1 - d) < std::abs(l2 - d)) ? l1 : l2;
}

struct Givens {
  double c;
  cxd s;
};

inline Givens make_givens(cxd f, cxd g) {
  // unitary [c, s; -conj(s), c] with real c, zeroing g
  const double af = std::abs(f), ag = std::abs(g);
  if (ag == 0.0) return {1.0, cxd(0.0)};
  if (af == 0.0) return {0.0, std::conj(g) / ag};
  const double r = std::hypot(af, ag);
  return {af / r, (f / af) * std::conj(g) / r};
}

// Eigenvalues of an upper Hessenberg matrix by explicit single-shift QR
// with deflation. Destroys `h`. Throws NoConvergence with the stalled
// block index when the budget runs out.
inline std::vector<cxd> hessenberg_qr_eigenvalues(ComplexMatrix h,
                                                  index_t max_total_iters) {
  const index_t n = h.rows();
  std::vector<cxd> eig(n);
  if (n == 0) return eig;
  const double eps = std::numeric_limits<double>::epsilon();
  const double hnorm = std::max(norm_max(h), 1e-300);

  index_t hi = n - 1;
  index_t total = 0;
  index_t stall = 0;
  std::vector<Givens> rot(n);
  while (true) {
    // deflate trailing converged entries
    while (hi > 0) {
      const double sub = std::abs(h(hi, hi - 1));
      const double scale = std::abs(h(hi - 1, hi - 1)) + std::abs(h(hi, hi));
      if (sub <= eps * (scale > 0.0 ? scale : hnorm)) {
        h(hi, hi - 1) = cxd(0.0);
        eig[hi] = h(hi, hi);
        --hi;
        stall = 0;
      } else {
        break;
      }
    }
    if (hi == 0) {
      eig[0] = h(0, 0);
      break;
    }
    // find the active block [lo, hi]
    index_t lo = hi;
    while (lo > 0) {
      const double sub = std::abs(h(lo, lo - 1));
      const double scale = std::abs(h(lo - 1, lo - 1)) + std::abs(h(lo, lo));
      if (sub <= eps * (scale > 0.0 ? scale : hnorm)) {
        h(lo, lo - 1) = cxd(0.0);
        break;
      }
      --lo;
    }

    if (++total > max_total_iters)
      throw NoConvergence("eig_dense: QR iteration stalled", hi,
                          std::abs(h(hi, hi - 1)));

    cxd mu = wilkinson_shift(h, hi);
    if (++stall % 12 == 0) {
      // exceptional shift to break symmetric limit cycles
      mu = h(hi, hi) + cxd(0.75 * std::abs(h(hi, hi - 1)), 0.0);
    }

    // explicit QR step on the active block: H - mu I = Q R, H <- R Q + mu I
    for (index_t i = lo; i <= hi; ++i) h(i, i) -= mu;
    for (index_t i = lo; i < hi; ++i) {
      Givens gv = make_givens(h(i, i), h(i + 1, i));
      rot[i] = gv;
      const index_t jend = std::min(hi + 1, n);
      for (index_t j = i; j < jend; ++j) {
        const cxd x = h(i, j), y = h(i + 1, j);
        h(i, j) = gv.c * x + gv.s * y;
        h(i + 1, j) = -std::conj(gv.s) * x + gv.c * y;
      }
      h(i + 1, i) = cxd(0.0);
    }
    for (index_t i = lo; i < hi; ++i) {
      const Givens gv = rot[i];
      for (index_t r = lo; r <= std::min(i + 1, hi); ++r) {
        const cxd x = h(r, i), y = h(r, i + 1);
        h(r, i) = gv.c * x + std::conj(gv.s) * y;
        h(r, i + 1) = -gv.s * x + gv.c * y;
      }
    }
    for (index_t i = lo; i <= hi; ++i) h(i, i) += mu;
  }
  return eig;
}

// One eigenvector of the original matrix via inverse iteration on the
// Hessenberg form, back-transformed by q.
inline std::vector<cxd> hessenberg_inverse_iteration(const ComplexMatrix& h0,
                                                     const ComplexMatrix& q,
                                                     cxd lambda,
                                                     index_t copy_index) {
  const index_t n = h0.rows();
  const double eps = std::numeric_limits<double>::epsilon();
  const double hnorm = std::max(norm_max(h0), 1e-300);
  // tiny deterministic shift separates repeated copies and guards exact
  // singularity of the shifted solve
  const cxd shift =
      lambda + cxd(double(copy_index + 1) * 8.0 * eps * hnorm, 0.0);

  // Hessenberg Gaussian elimination with partial pivoting of (H - shift I)
  ComplexMatrix u = h0;
  for (index_t i = 0; i < n; ++i) u(i, i) -= shift;
  std::vector<index_t> swapped(n, 0);
  std::vector<cxd> mult(n, cxd(0.0));
  for (index_t k = 0; k + 1 < n; ++k) {
    if (std::abs(u(k + 1, k)) > std::abs(u(k, k))) {
      swapped[k] = 1;
      for (index_t j = k; j < n; ++j) std::swap(u(k, j), u(k + 1, j));
    }
    cxd piv = u(k, k);
    if (piv == cxd(0.0)) {
      piv = cxd(eps * hnorm);
      u(k, k) = piv;
    }
    const cxd m = u(k + 1, k) / piv;
    mult[k] = m;
    u(k + 1, k) = cxd(0.0);
    for (index_t j = k + 1; j < n; ++j) u(k + 1, j) -= m * u(k, j);
  }
  if (u(n - 1, n - 1) == cxd(0.0)) u(n - 1, n - 1) = cxd(eps * hnorm);

  std::vector<cxd> y(n, cxd(1.0 / std::sqrt(double(n))));
  for (int iter = 0; iter < 3; ++iter) {
    // apply recorded row operations
    for (index_t k = 0; k + 1 < n; ++k) {
      if (swapped[k]) std::swap(y[k], y[k + 1]);
      y[k + 1] -= mult[k] * y[k];
    }
    // back substitution
    for (index_t kk = n; kk-- > 0;) {
      cxd s = y[kk];
      for (index_t j = kk + 1; j < n; ++j) s -= u(kk, j) * y[j];
      y[kk] = s / u(kk, kk);
    }
    const double yn = vec_norm(y);
    if (!(yn > 0.0) || !std::isfinite(yn)) {
      y.assign(n, cxd(0.0));
      y[copy_index % n] = 1.0;
      continue;
    }
    for (cxd& x : y) x /= yn;
    if (iter >= 1) break;
  }
  std::vector<cxd> x = matvec(q, y);
  const double xn = vec_norm(x);
  for (cxd& v : x) v /= xn;
  return x;
}

}  // namespace detail

/// All eigenvalues (and optionally eigenvectors) of a square complex
/// matrix: Hessenberg reduction, shifted QR for values, inverse iteration
/// on the Hessenberg form for vectors. Pairs are sorted by (Re, Im).
inline std::vector<Eigenpair> eig_dense(ConstMatView m,
                                        const EigOptions& opt = {}) {
  if (m.rows != m.cols) throw DimensionMismatch("eig_dense: matrix not square");
  const index_t n = m.rows;
  if (n > opt.max_dim)
    throw InvalidArgument("eig_dense: dimension exceeds small-dense cap");
  std::vector<Eigenpair> out;
  if (n == 0) return out;

  ComplexMatrix h = m.to_matrix();
  ComplexMatrix q;
  detail::hessenberg_reduce(h, q);
  std::vector<cxd> values =
      detail::hessenberg_qr_eigenvalues(h, opt.max_iters_per_dim * n);
  std::sort(values.begin(), values.end(), [](cxd a, cxd b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });

  out.resize(n);
  for (index_t i = 0; i < n; ++i) {
    out[i].value = values[i];
    if (opt.with_vectors) {
      // count how many identical eigenvalues precede this one so repeated
      // copies get decorrelated inverse-iteration shifts
      index_t copy = 0;
      for (index_t j = i; j-- > 0;) {
        if (std::abs(values[j] - values[i]) <=
            1e-12 * std::max(1.0, std::abs(values[i])))
          ++copy;
        else
          break;
      }
      out[i].vector = detail::hessenberg_inverse_iteration(h, q, values[i], copy);
    }
  }
  return out;
}

/// Reduced generalized problem A_red t = theta B_red t, solved by explicit
/// LU inversion of B_red followed by a standard dense eigensolve. The
/// projected B is well-conditioned whenever the rank cutoff did its job;
/// failure surfaces as SingularReducedB instead of silent regularization.
inline std::vector<Eigenpair> eig_reduced_gep(ConstMatView a_red,
                                              ConstMatView b_red,
                                              const EigOptions& opt = {}) {
  if (a_red.rows != a_red.cols || b_red.rows != b_red.cols ||
      a_red.rows != b_red.rows)
    throw DimensionMismatch("eig_reduced_gep: shape mismatch");
  LuFactorization f;
  try {
    f = lu_factor(b_red);
  } catch (const SingularMatrix& e) {
    throw SingularReducedB(std::string("reduced B is singular: ") + e.what());
  }
  if (f.recip_cond < 1e-12)
    throw SingularReducedB("reduced B reciprocal condition below 1e-12");
  ComplexMatrix binv_a = lu_solve(f, a_red);
  return eig_dense(binv_a, opt);
}

}  // namespace cieig
