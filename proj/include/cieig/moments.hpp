// Copyright (c) 2026 The cieig developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cmath>
#include <future>
#include <utility>
#include <vector>

#include "cieig/contour.hpp"
#include "cieig/lu.hpp"
#include "cieig/pencil.hpp"
#include "cieig/qr.hpp"

namespace cieig {

/// Wall-clock phase breakdown, mirroring the usual cost decomposition of
/// contour solvers (factorization, triangular solves, everything else).
struct Timings {
  double t_lu = 0.0;
  double t_solve = 0.0;
  double t_other = 0.0;
  double t_total = 0.0;
};

struct MomentOptions {
  bool half_contour = false;    // conjugate doubling on symmetric problems
  int threads = 1;              // per-point concurrency
  bool compensated_sum = false; // Kahan accumulation in moment reductions
};

namespace detail {

using steady = std::chrono::steady_clock;

inline double elapsed(steady::time_point t0) {
  return std::chrono::duration<double>(steady::now() - t0).count();
}

template <typename Body>
void parallel_for(index_t count, int threads, Body&& body) {
  if (threads <= 1 || count <= 1) {
    for (index_t i = 0; i < count; ++i) body(i);
    return;
  }
  const index_t nt = std::min<index_t>(threads, count);
  std::vector<std::future<void>> futs;
  futs.reserve(nt);
  for (index_t t = 0; t < nt; ++t) {
    futs.push_back(std::async(std::launch::async, [&, t]() {
      for (index_t i = t; i < count; i += nt) body(i);
    }));
  }
  for (auto& f : futs) f.get();
}

}  // namespace detail

/// LU factorizations of (z_j B - A) at the quadrature points, plus the
/// data needed to run the weighted moment reductions. Immutable after
/// construction; safe to share across solver invocations.
struct PointFactorizations {
  QuadratureRule rule;
  bool half = false;
  std::vector<index_t> active;    // indices into rule.points
  std::vector<char> on_axis;      // parallel to active; only in half mode
  std::vector<LuFactorization> factors;
  std::vector<double> recip_conds;
  ComplexMatrix b;                // copy of the pencil's B for RHS products
  bool b_is_identity = false;
  index_t dim = 0;
  double t_lu = 0.0;
  int threads = 1;

  index_t active_count() const { return active.size(); }
};

/// Factor all quadrature-point systems. With half_contour on a real pencil
/// and a conjugation-symmetric rule, only the upper half-plane points (plus
/// real-axis points) are factored and later solves are conjugate-doubled.
inline PointFactorizations factorize_points(const MatrixPencil& pencil,
                                            const QuadratureRule& rule,
                                            const MomentOptions& opts = {}) {
  PointFactorizations pf;
  pf.rule = rule;
  pf.b = pencil.b;
  pf.b_is_identity = pencil.b_is_identity;
  pf.dim = pencil.dim();
  pf.threads = std::max(1, opts.threads);

  const index_t n_pts = rule.size();
  if (opts.half_contour) {
    if (!pencil.is_real())
      throw InvalidArgument("half_contour requires a real pencil");
    if (!rule.region.real_symmetric())
      throw InvalidArgument("half_contour requires a region symmetric about the real axis");
    // verify the rule is closed under conjugation and collect the upper half
    double scale = 0.0;
    for (const cxd& z : rule.points) scale = std::max(scale, std::abs(z));
    const double tol = 1e-12 * std::max(scale, 1.0);
    for (index_t j = 0; j < n_pts; ++j) {
      const cxd zj = rule.points[j];
      if (zj.imag() < -tol) {
        bool paired = false;
        for (index_t q = 0; q < n_pts && !paired; ++q)
          paired = std::abs(rule.points[q] - std::conj(zj)) <= tol &&
                   std::abs(rule.weights[q] - std::conj(rule.weights[j])) <= tol;
        if (!paired)
          throw InvalidArgument("half_contour: rule is not conjugation symmetric");
        continue;
      }
      pf.active.push_back(j);
      pf.on_axis.push_back(std::abs(zj.imag()) <= tol ? 1 : 0);
    }
    pf.half = true;
  } else {
    pf.active.resize(n_pts);
    for (index_t j = 0; j < n_pts; ++j) pf.active[j] = j;
    pf.on_axis.assign(n_pts, 0);
  }

  const index_t count = pf.active.size();
  pf.factors.resize(count);
  pf.recip_conds.resize(count);
  std::vector<index_t> failed(count, 0);
  const auto t0 = detail::steady::now();
  detail::parallel_for(count, pf.threads, [&](index_t idx) {
    const index_t j = pf.active[idx];
    const cxd z = rule.points[j];
    ComplexMatrix shifted(pf.dim, pf.dim);
    for (index_t c = 0; c < pf.dim; ++c)
      for (index_t r = 0; r < pf.dim; ++r)
        shifted(r, c) = z * pencil.b(r, c) - pencil.a(r, c);
    try {
      pf.factors[idx] = lu_factor(shifted);
      pf.recip_conds[idx] = pf.factors[idx].recip_cond;
    } catch (const SingularMatrix&) {
      failed[idx] = 1;
    }
  });
  pf.t_lu = detail::elapsed(t0);
  for (index_t idx = 0; idx < count; ++idx)
    if (failed[idx])
      throw QuadraturePointHitsSpectrum(pf.active[idx],
                                        rule.points[pf.active[idx]]);
  return pf;
}

/// Per-point solutions Y_j = (z_j B - A)^{-1} (B V) for the active points.
/// Records the triangular-solve wall time into t_solve.
inline std::vector<ComplexMatrix> solve_point_systems(
    const PointFactorizations& pf, ConstMatView v, double& t_solve) {
  if (v.rows != pf.dim)
    throw DimensionMismatch("solve_point_systems: V row count mismatch");
  // B V computed once and reused across all points
  ComplexMatrix bv = pf.b_is_identity ? v.to_matrix() : matmul(pf.b, v);
  const index_t count = pf.active_count();
  std::vector<ComplexMatrix> ys(count);
  const auto t0 = detail::steady::now();
  detail::parallel_for(count, pf.threads, [&](index_t idx) {
    ys[idx] = lu_solve(pf.factors[idx], bv);
  });
  t_solve += detail::elapsed(t0);
  return ys;
}

/// All moment blocks S_0..S_M of one seed block V; the shared intermediate
/// of every solver. Blocks are stored contiguously so the subspace matrix
/// [S_0..S_{M-1}] and its shift [S_1..S_M] are copy-free column views.
struct MomentStack {
  ComplexMatrix all;   // n x (L * (degree+1))
  index_t width = 0;   // L
  index_t degree = 0;  // M
  double t_solve = 0.0;

  ConstMatView block(index_t k) const {
    if (k > degree) throw InsufficientDegree("moment stack block out of range");
    return {all.col(k * width), all.rows(), width, all.rows()};
  }
  /// [S_0 .. S_{m-1}], n x (L m)
  ConstMatView subspace(index_t m) const {
    if (m > degree) throw InsufficientDegree("moment stack too short for subspace");
    return {all.col(0), all.rows(), width * m, all.rows()};
  }
  /// [S_1 .. S_m], n x (L m)
  ConstMatView shifted(index_t m) const {
    if (m > degree)
      throw InsufficientDegree("moment stack too short for shifted subspace");
    return {all.col(width), all.rows(), width * m, all.rows()};
  }
};

namespace detail {

// S_k accumulation with fixed ascending-point order; optional Kahan
// compensation. Half mode adds 2 Re(c * y) for paired points, which keeps
// the result exactly real for real problems.
inline void accumulate_weighted(ComplexMatrix& dest, const ComplexMatrix& y,
                                cxd coeff, bool doubled,
                                std::vector<cxd>* comp) {
  const index_t total = dest.rows() * dest.cols();
  cxd* d = dest.data();
  const cxd* s = y.data();
  if (!doubled) {
    if (comp) {
      for (index_t i = 0; i < total; ++i) {
        const cxd term = coeff * s[i] - (*comp)[i];
        const cxd t = d[i] + term;
        (*comp)[i] = (t - d[i]) - term;
        d[i] = t;
      }
    } else {
      for (index_t i = 0; i < total; ++i) d[i] += coeff * s[i];
    }
  } else {
    if (comp) {
      for (index_t i = 0; i < total; ++i) {
        const cxd prod = coeff * s[i];
        const cxd term = cxd(2.0 * prod.real(), 0.0) - (*comp)[i];
        const cxd t = d[i] + term;
        (*comp)[i] = (t - d[i]) - term;
        d[i] = t;
      }
    } else {
      for (index_t i = 0; i < total; ++i) {
        const cxd prod = coeff * s[i];
        d[i] += cxd(2.0 * prod.real(), 0.0);
      }
    }
  }
}

}  // namespace detail

/// Moment blocks S_k = sum_j w_j z_j^k Y_j for k = 0..degree. The stack
/// carries degree+1 blocks so both [S_0..S_{M-1}] and [S_1..S_M] are
/// available without recomputation; Hankel callers request degree 2M-1.
inline MomentStack compute_moments(const PointFactorizations& pf, ConstMatView v,
                                   index_t degree,
                                   const MomentOptions& opts = {}) {
  if (degree < 1) throw InvalidArgument("compute_moments: degree must be >= 1");
  if (v.rows != pf.dim)
    throw DimensionMismatch("compute_moments: V row count mismatch");
  if (pf.half) {
    for (index_t j = 0; j < v.cols; ++j)
      for (index_t i = 0; i < v.rows; ++i)
        if (v(i, j).imag() != 0.0)
          throw InvalidArgument("compute_moments: half-contour needs a real V");
  }

  MomentStack stack;
  stack.width = v.cols;
  stack.degree = degree;
  stack.all = ComplexMatrix(v.rows, v.cols * (degree + 1));

  std::vector<ComplexMatrix> ys = solve_point_systems(pf, v, stack.t_solve);

  const index_t count = pf.active_count();
  std::vector<cxd> zpow(count, cxd(1.0));
  std::vector<cxd> comp;
  for (index_t k = 0; k <= degree; ++k) {
    ComplexMatrix block(v.rows, v.cols);
    if (opts.compensated_sum) comp.assign(v.rows * v.cols, cxd(0.0));
    for (index_t idx = 0; idx < count; ++idx) {
      const index_t j = pf.active[idx];
      const cxd coeff = pf.rule.weights[j] * zpow[idx];
      const bool doubled = pf.half && !pf.on_axis[idx];
      detail::accumulate_weighted(block, ys[idx], coeff, doubled,
                                  opts.compensated_sum ? &comp : nullptr);
      zpow[idx] *= pf.rule.points[j];
    }
    std::copy(block.data(), block.data() + v.rows * v.cols,
              stack.all.col(k * v.cols));
  }
  return stack;
}

/// One application of the rational filter, sum_j w_j Y_j (the k = 0
/// moment). Used by the subspace-iteration paths.
inline ComplexMatrix apply_filter(const PointFactorizations& pf, ConstMatView v,
                                  double& t_solve,
                                  const MomentOptions& opts = {}) {
  if (pf.half) {
    for (index_t j = 0; j < v.cols; ++j)
      for (index_t i = 0; i < v.rows; ++i)
        if (v(i, j).imag() != 0.0)
          throw InvalidArgument("apply_filter: half-contour needs a real V");
  }
  std::vector<ComplexMatrix> ys = solve_point_systems(pf, v, t_solve);
  ComplexMatrix out(v.rows, v.cols);
  std::vector<cxd> comp;
  if (opts.compensated_sum) comp.assign(v.rows * v.cols, cxd(0.0));
  for (index_t idx = 0; idx < pf.active_count(); ++idx) {
    const index_t j = pf.active[idx];
    const bool doubled = pf.half && !pf.on_axis[idx];
    detail::accumulate_weighted(out, ys[idx], pf.rule.weights[j], doubled,
                                opts.compensated_sum ? &comp : nullptr);
  }
  return out;
}

/// Block complex moments mu_k = Vtilde^H S_k for k = 0..upto.
inline std::vector<ComplexMatrix> block_moments(ConstMatView vtilde,
                                                const MomentStack& stack,
                                                index_t upto) {
  if (upto > stack.degree)
    throw InsufficientDegree("block_moments: stack degree " +
                             std::to_string(stack.degree) +
                             " < requested " + std::to_string(upto));
  if (vtilde.rows != stack.all.rows())
    throw DimensionMismatch("block_moments: Vtilde row count mismatch");
  std::vector<ComplexMatrix> mu;
  mu.reserve(upto + 1);
  for (index_t k = 0; k <= upto; ++k)
    mu.push_back(matmul_adjA(vtilde, stack.block(k)));
  return mu;
}

/// Block Hankel pair: H[i][j] = mu_{i+j}, H_shift[i][j] = mu_{i+j+1}
/// (block indices), both L M x L M. Needs moments up to degree 2M-1.
inline std::pair<ComplexMatrix, ComplexMatrix> assemble_hankel(
    const std::vector<ComplexMatrix>& moments, index_t m) {
  if (m < 1) throw InvalidArgument("assemble_hankel: M must be >= 1");
  if (moments.size() < 2 * m)
    throw InsufficientDegree("assemble_hankel: need 2M moment blocks");
  const index_t l = moments[0].rows();
  for (const auto& mu : moments)
    if (mu.rows() != l || mu.cols() != l)
      throw DimensionMismatch("assemble_hankel: moment blocks must be L x L");
  ComplexMatrix h(l * m, l * m), hs(l * m, l * m);
  for (index_t bi = 0; bi < m; ++bi)
    for (index_t bj = 0; bj < m; ++bj) {
      const ComplexMatrix& mu = moments[bi + bj];
      const ComplexMatrix& mu1 = moments[bi + bj + 1];
      for (index_t j = 0; j < l; ++j)
        for (index_t i = 0; i < l; ++i) {
          h(bi * l + i, bj * l + j) = mu(i, j);
          hs(bi * l + i, bj * l + j) = mu1(i, j);
        }
    }
  return {std::move(h), std::move(hs)};
}

/// Filtered subspace iteration seed: applies the rational filter ell-1
/// times starting from V, re-orthonormalizing between applications
/// (preserves the span, which is all the theory uses). ell = 1 returns V
/// unchanged; the caller's moment computation supplies the final
/// application.
inline ComplexMatrix refine_subspace(const PointFactorizations& pf,
                                     ConstMatView v, index_t ell,
                                     double& t_solve,
                                     const MomentOptions& opts = {}) {
  if (ell < 1) throw InvalidArgument("refine_subspace: ell must be >= 1");
  ComplexMatrix cur = v.to_matrix();
  for (index_t nu = 1; nu < ell; ++nu) {
    ComplexMatrix filtered = apply_filter(pf, cur, t_solve, opts);
    auto [q, r] = qr_orthonormalize(filtered);
    if (pf.half) {
      // keep the iterate exactly real so the doubling stays valid
      for (index_t i = 0; i < q.rows() * q.cols(); ++i)
        q.data()[i] = cxd(q.data()[i].real(), 0.0);
    }
    cur = std::move(q);
  }
  return cur;
}

}  // namespace cieig
