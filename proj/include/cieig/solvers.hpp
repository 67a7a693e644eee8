// Copyright (c) 2026 The cieig developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cieig/contour.hpp"
#include "cieig/eig.hpp"
#include "cieig/moments.hpp"
#include "cieig/pencil.hpp"
#include "cieig/svd.hpp"

namespace cieig {

enum class Method { ss_hankel, ss_rr, feast, ss_arnoldi, beyn, ss_beyn };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::ss_hankel: return "ss_hankel";
    case Method::ss_rr: return "ss_rr";
    case Method::feast: return "feast";
    case Method::ss_arnoldi: return "ss_arnoldi";
    case Method::beyn: return "beyn";
    case Method::ss_beyn: return "ss_beyn";
  }
  return "?";
}

inline std::optional<Method> method_from_name(const std::string& s) {
  for (Method m : {Method::ss_hankel, Method::ss_rr, Method::feast,
                   Method::ss_arnoldi, Method::beyn, Method::ss_beyn})
    if (s == method_name(m)) return m;
  return std::nullopt;
}

struct SolverConfig {
  index_t l = 16;                 // block width L
  index_t m = 4;                  // moment degree M
  index_t n_points = 32;          // quadrature point count N
  RuleKind rule_kind = RuleKind::trapezoidal;
  double rank_cutoff = 1e-14;     // delta: keep sigma_i / sigma_1 >= delta
  index_t max_feast_iters = 20;
  double feast_tol = 1e-12;
  std::uint64_t seed = 1;
  Method method = Method::ss_rr;
  index_t refine_ell = 1;         // filtered-iteration count (1 = off)
  bool complex_v = false;         // complex-normal start block instead of real
  bool vtilde_equals_v = false;   // SS-Hankel: reuse V as the left block
  MomentOptions moments;

  void validate() const {
    if (l * m < 1) throw InvalidArgument("solver config: L*M must be >= 1");
    if (!(rank_cutoff >= 0.0) || rank_cutoff >= 1.0)
      throw InvalidArgument("solver config: rank cutoff must be in [0, 1)");
    if (n_points < 2) throw InvalidArgument("solver config: N must be >= 2");
  }
};

struct ResultPair {
  cxd value;
  std::vector<cxd> vector;  // unit 2-norm
  double residual = 0.0;    // ||A x - lambda B x||_2
  bool inside = false;
};

struct EigenResult {
  std::vector<ResultPair> pairs;
  index_t rank_used = 0;  // numerical rank m-hat after truncation
  Timings timing;
  Method method = Method::ss_rr;
  index_t iterations_used = 1;
  bool converged = true;                 // FEAST stop criterion reached
  std::vector<double> residual_history;  // FEAST: max in-region residual per pass
  std::vector<std::string> notes;

  std::vector<const ResultPair*> inside_pairs() const {
    std::vector<const ResultPair*> out;
    for (const auto& p : pairs)
      if (p.inside) out.push_back(&p);
    return out;
  }
  double max_inside_residual() const {
    double r = 0.0;
    for (const auto& p : pairs)
      if (p.inside) r = std::max(r, p.residual);
    return r;
  }
};

// ---------------------------------------------------------------------------
// residual evaluation and region selection

inline double pair_residual(const MatrixPencil& pencil, cxd value,
                            std::span<const cxd> x) {
  std::vector<cxd> ax = matvec(pencil.a, x);
  std::vector<cxd> bx = matvec(pencil.b, x);
  double s = 0.0;
  for (index_t i = 0; i < ax.size(); ++i) s += std::norm(ax[i] - value * bx[i]);
  return std::sqrt(s);
}

/// Recompute ||A x - lambda B x||_2 for each pair.
inline std::vector<double> residuals(const MatrixPencil& pencil,
                                     const std::vector<ResultPair>& pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs)
    out.push_back(pair_residual(pencil, p.value, p.vector));
  return out;
}

/// Set the inside flags by region membership (semi-axes grown or shrunk by
/// `margin`) and return the partition sizes. Pairs outside are flagged,
/// never dropped.
struct RegionPartition {
  index_t inside_count = 0;
  index_t outside_count = 0;
};

inline RegionPartition select_in_region(std::vector<ResultPair>& pairs,
                                        const ContourRegion& region,
                                        double margin = 0.0) {
  RegionPartition part;
  for (auto& p : pairs) {
    p.inside = (margin == 0.0) ? region.contains(p.value)
                               : region.contains_with_margin(p.value, margin);
    if (p.inside)
      ++part.inside_count;
    else
      ++part.outside_count;
  }
  return part;
}

namespace detail {

inline ComplexMatrix make_start_block(const SolverConfig& cfg, index_t n,
                                      std::mt19937_64& rng) {
  return cfg.complex_v ? random_complex_gaussian(n, cfg.l, rng)
                       : random_real_gaussian(n, cfg.l, rng);
}

struct PfHolder {
  const PointFactorizations* pf = nullptr;
  PointFactorizations owned;
  bool built_here = false;
};

inline PfHolder ensure_factorizations(const MatrixPencil& pencil,
                                      const ContourRegion& region,
                                      const SolverConfig& cfg,
                                      const PointFactorizations* shared,
                                      bool force_full = false) {
  PfHolder h;
  if (shared != nullptr && !(force_full && shared->half)) {
    h.pf = shared;
    return h;
  }
  QuadratureRule rule = build_rule(region, cfg.rule_kind, cfg.n_points);
  MomentOptions opts = cfg.moments;
  if (force_full) opts.half_contour = false;
  if (opts.half_contour && !(pencil.is_real() && region.real_symmetric()))
    opts.half_contour = false;
  h.owned = factorize_points(pencil, rule, opts);
  h.pf = &h.owned;
  h.built_here = true;
  return h;
}

inline void finalize_result(EigenResult& res, const MatrixPencil& pencil,
                            const ContourRegion& region,
                            std::vector<Eigenpair> raw,
                            const ComplexMatrix& basis) {
  // raw pairs live in reduced coordinates; lift with `basis` (n x k)
  res.pairs.clear();
  res.pairs.reserve(raw.size());
  for (auto& ep : raw) {
    ResultPair p;
    p.value = ep.value;
    p.vector = matvec(basis, ep.vector);
    const double nrm = vec_norm(p.vector);
    if (!(nrm > 0.0)) continue;
    for (cxd& x : p.vector) x /= nrm;
    p.residual = pair_residual(pencil, p.value, p.vector);
    res.pairs.push_back(std::move(p));
  }
  std::sort(res.pairs.begin(), res.pairs.end(),
            [](const ResultPair& a, const ResultPair& b) {
              if (a.value.real() != b.value.real())
                return a.value.real() < b.value.real();
              return a.value.imag() < b.value.imag();
            });
  select_in_region(res.pairs, region);
}

/// Scale columns of w by 1 / sigma_j.
inline ComplexMatrix scale_columns_inv(const ComplexMatrix& w,
                                       const std::vector<double>& sigma,
                                       index_t k) {
  ComplexMatrix out(w.rows(), k);
  for (index_t j = 0; j < k; ++j) {
    const double inv = 1.0 / sigma[j];
    for (index_t i = 0; i < w.rows(); ++i) out(i, j) = w(i, j) * inv;
  }
  return out;
}

inline ComplexMatrix left_columns(const ComplexMatrix& m, index_t k) {
  return m.columns(0, k);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// the six solvers

/// Block SS-Hankel: Petrov-Galerkin reduction via block complex moments
/// mu_k = Vtilde^H S_k and the Hankel pencil built from them.
inline EigenResult solve_ss_hankel(const MatrixPencil& pencil,
                                   const ContourRegion& region,
                                   const SolverConfig& cfg,
                                   const ComplexMatrix* vtilde_in = nullptr,
                                   const PointFactorizations* shared_pf = nullptr) {
  cfg.validate();
  if (cfg.m < 1) throw InvalidArgument("ss_hankel: M must be >= 1");
  EigenResult res;
  res.method = Method::ss_hankel;
  const auto t0 = detail::steady::now();

  detail::PfHolder pf = detail::ensure_factorizations(pencil, region, cfg, shared_pf);
  res.timing.t_lu = pf.pf->t_lu;

  std::mt19937_64 rng(cfg.seed);
  ComplexMatrix v = detail::make_start_block(cfg, pencil.dim(), rng);
  ComplexMatrix vtilde = vtilde_in
                             ? *vtilde_in
                             : (cfg.vtilde_equals_v
                                    ? v
                                    : detail::make_start_block(cfg, pencil.dim(), rng));
  if (cfg.refine_ell > 1)
    v = refine_subspace(*pf.pf, v, cfg.refine_ell, res.timing.t_solve, cfg.moments);

  MomentStack stack =
      compute_moments(*pf.pf, v, 2 * cfg.m - 1, cfg.moments);
  res.timing.t_solve += stack.t_solve;
  std::vector<ComplexMatrix> mu = block_moments(vtilde, stack, 2 * cfg.m - 1);
  auto [h, h_shift] = assemble_hankel(mu, cfg.m);

  SvdResult sv = svd(h);
  const index_t mhat = sv.rank(cfg.rank_cutoff);
  if (mhat == 0) throw RankCollapse("ss_hankel: Hankel matrix has rank 0");
  res.rank_used = mhat;

  ComplexMatrix u1 = detail::left_columns(sv.u, mhat);
  ComplexMatrix w1s = detail::scale_columns_inv(sv.v, sv.singular_values, mhat);
  // reduced = U1^H Hshift W1 Sigma1^-1  (the derivation form)
  ComplexMatrix reduced = matmul_adjA(u1, matmul(h_shift, w1s));
  std::vector<Eigenpair> ritz = eig_dense(reduced);

  // lift: x = S * (W1 Sigma1^-1 t)
  ComplexMatrix lift = matmul(stack.subspace(cfg.m), w1s);
  detail::finalize_result(res, pencil, region, std::move(ritz), lift);

  res.timing.t_other =
      detail::elapsed(t0) - res.timing.t_solve - (pf.built_here ? res.timing.t_lu : 0.0);
  if (res.timing.t_other < 0.0) res.timing.t_other = 0.0;
  res.timing.t_total = res.timing.t_lu + res.timing.t_solve + res.timing.t_other;
  return res;
}

/// Block SS-RR: Rayleigh-Ritz on the truncated moment subspace, applied to
/// the original generalized problem.
inline EigenResult solve_ss_rr(const MatrixPencil& pencil,
                               const ContourRegion& region,
                               const SolverConfig& cfg,
                               const PointFactorizations* shared_pf = nullptr) {
  cfg.validate();
  if (cfg.m < 1) throw InvalidArgument("ss_rr: M must be >= 1");
  EigenResult res;
  res.method = Method::ss_rr;
  const auto t0 = detail::steady::now();

  detail::PfHolder pf = detail::ensure_factorizations(pencil, region, cfg, shared_pf);
  res.timing.t_lu = pf.pf->t_lu;

  std::mt19937_64 rng(cfg.seed);
  ComplexMatrix v = detail::make_start_block(cfg, pencil.dim(), rng);
  if (cfg.refine_ell > 1)
    v = refine_subspace(*pf.pf, v, cfg.refine_ell, res.timing.t_solve, cfg.moments);

  MomentStack stack = compute_moments(*pf.pf, v, cfg.m, cfg.moments);
  res.timing.t_solve += stack.t_solve;

  SvdResult sv = svd(stack.subspace(cfg.m));
  const index_t mhat = sv.rank(cfg.rank_cutoff);
  if (mhat == 0) throw RankCollapse("ss_rr: moment subspace has rank 0");
  res.rank_used = mhat;

  ComplexMatrix u1 = detail::left_columns(sv.u, mhat);
  ComplexMatrix a_red = matmul_adjA(u1, matmul(pencil.a, u1));
  ComplexMatrix b_red = matmul_adjA(u1, matmul(pencil.b, u1));
  std::vector<Eigenpair> ritz = eig_reduced_gep(a_red, b_red);

  detail::finalize_result(res, pencil, region, std::move(ritz), u1);

  res.timing.t_other =
      detail::elapsed(t0) - res.timing.t_solve - (pf.built_here ? res.timing.t_lu : 0.0);
  if (res.timing.t_other < 0.0) res.timing.t_other = 0.0;
  res.timing.t_total = res.timing.t_lu + res.timing.t_solve + res.timing.t_other;
  return res;
}

namespace detail {

// Rotate the dominant entry onto the real axis and drop noise-level
// imaginary parts; keeps FEAST iterates exactly real on real problems so
// the half-contour doubling stays valid.
inline void realign_real(std::vector<cxd>& v) {
  double best = 0.0;
  cxd lead(1.0);
  for (const cxd& x : v)
    if (std::abs(x) > best) { best = std::abs(x); lead = x; }
  if (best == 0.0) return;
  const cxd phase = std::conj(lead) / best;
  double im = 0.0, re = 0.0;
  for (cxd& x : v) {
    x *= phase;
    re += x.real() * x.real();
    im += x.imag() * x.imag();
  }
  if (im <= 1e-24 * re)
    for (cxd& x : v) x = cxd(x.real(), 0.0);
}

}  // namespace detail

/// FEAST: accelerated subspace iteration with Rayleigh-Ritz, restricted to
/// Hermitian-definite pencils. Moment degree is forced to 1.
inline EigenResult solve_feast(const MatrixPencil& pencil,
                               const ContourRegion& region,
                               const SolverConfig& cfg,
                               const PointFactorizations* shared_pf = nullptr) {
  cfg.validate();
  if (!pencil.hermitian_a || !pencil.hpd_b)
    throw NotHermitianDefinite(
        "feast requires hermitian_A and hpd_B flags on the pencil");
  if (cfg.max_feast_iters < 1)
    throw InvalidArgument("feast: max_feast_iters must be >= 1");
  EigenResult res;
  res.method = Method::feast;
  if (cfg.m > 1)
    res.notes.push_back("feast: moment degree forced to 1 (config had M=" +
                        std::to_string(cfg.m) + ")");
  const auto t0 = detail::steady::now();

  detail::PfHolder pf = detail::ensure_factorizations(pencil, region, cfg, shared_pf);
  res.timing.t_lu = pf.pf->t_lu;

  std::mt19937_64 rng(cfg.seed);
  ComplexMatrix v = detail::make_start_block(cfg, pencil.dim(), rng);

  std::vector<Eigenpair> ritz;
  ComplexMatrix basis;
  res.converged = false;
  index_t k = 0;
  while (k < cfg.max_feast_iters) {
    ++k;
    ComplexMatrix s0 = apply_filter(*pf.pf, v, res.timing.t_solve, cfg.moments);
    auto [q, r] = qr_orthonormalize(s0);
    ComplexMatrix a_red = matmul_adjA(q, matmul(pencil.a, q));
    ComplexMatrix b_red = matmul_adjA(q, matmul(pencil.b, q));
    ritz = eig_reduced_gep(a_red, b_red);
    basis = std::move(q);

    // next iterate: all Ritz vectors, unit columns
    ComplexMatrix vnext(pencil.dim(), cfg.l);
    double worst_inside = 0.0;
    for (index_t i = 0; i < ritz.size() && i < cfg.l; ++i) {
      std::vector<cxd> x = matvec(basis, ritz[i].vector);
      const double nrm = vec_norm(x);
      if (nrm > 0.0)
        for (cxd& e : x) e /= nrm;
      if (pf.pf->half) detail::realign_real(x);
      if (region.contains(ritz[i].value))
        worst_inside = std::max(worst_inside,
                                pair_residual(pencil, ritz[i].value, x));
      vnext.set_column(i, x);
    }
    res.residual_history.push_back(worst_inside);
    v = std::move(vnext);
    if (worst_inside < cfg.feast_tol) {
      res.converged = true;
      break;
    }
  }
  res.iterations_used = k;
  res.rank_used = cfg.l;

  detail::finalize_result(res, pencil, region, std::move(ritz), basis);

  res.timing.t_other =
      detail::elapsed(t0) - res.timing.t_solve - (pf.built_here ? res.timing.t_lu : 0.0);
  if (res.timing.t_other < 0.0) res.timing.t_other = 0.0;
  res.timing.t_total = res.timing.t_lu + res.timing.t_solve + res.timing.t_other;
  return res;
}

/// Block SS-Arnoldi: block Arnoldi on the implicitly applied filtered
/// operator, recombining the stored per-point solutions with coefficient
/// updates. No low-rank truncation: m-hat is always L*M.
inline EigenResult solve_ss_arnoldi(const MatrixPencil& pencil,
                                    const ContourRegion& region,
                                    const SolverConfig& cfg,
                                    const PointFactorizations* shared_pf = nullptr) {
  cfg.validate();
  if (cfg.m < 1) throw InvalidArgument("ss_arnoldi: M must be >= 1");
  if (cfg.l * cfg.m > pencil.dim())
    throw InvalidArgument("ss_arnoldi: L*M must not exceed the problem dimension");
  EigenResult res;
  res.method = Method::ss_arnoldi;
  const auto t0 = detail::steady::now();

  // the coefficient recombination needs every quadrature point explicitly
  detail::PfHolder pf = detail::ensure_factorizations(pencil, region, cfg,
                                                      shared_pf, /*force_full=*/true);
  if (pf.pf->half)
    throw InvalidArgument("ss_arnoldi requires full-contour factorizations");
  res.timing.t_lu = pf.pf->t_lu;

  std::mt19937_64 rng(cfg.seed);
  ComplexMatrix v = detail::make_start_block(cfg, pencil.dim(), rng);
  if (cfg.refine_ell > 1) {
    MomentOptions full = cfg.moments;
    full.half_contour = false;
    v = refine_subspace(*pf.pf, v, cfg.refine_ell, res.timing.t_solve, full);
  }

  const index_t n_pts = pf.pf->active_count();
  const index_t l = cfg.l, m = cfg.m, n = pencil.dim();
  std::vector<ComplexMatrix> ys = solve_point_systems(*pf.pf, v, res.timing.t_solve);

  // W0 = sum_j w_j Y_j ; QR gives the first basis block
  ComplexMatrix w0(n, l);
  for (index_t j = 0; j < n_pts; ++j)
    detail::accumulate_weighted(w0, ys[j], pf.pf->rule.weights[pf.pf->active[j]],
                                false, nullptr);

  std::vector<ComplexMatrix> w_blocks;  // orthonormal basis blocks
  ComplexMatrix h(l * m, l * m);        // block Hessenberg
  std::vector<std::vector<ComplexMatrix>> alpha(m + 1);
  try {
    auto [w1, r0] = qr_orthonormalize(w0);
    w_blocks.push_back(std::move(w1));
    LuFactorization r0f = lu_factor(r0);
    ComplexMatrix r0inv = lu_solve(r0f, ComplexMatrix::identity(l));
    alpha[0].assign(n_pts, r0inv);
  } catch (const RankDeficient& e) {
    throw ArnoldiBreakdown(std::string("ss_arnoldi: seed block rank deficient: ") + e.what());
  } catch (const SingularMatrix& e) {
    throw ArnoldiBreakdown(std::string("ss_arnoldi: seed R not invertible: ") + e.what());
  }

  for (index_t k = 0; k < m; ++k) {
    // alpha~_j = z_j alpha_j ; W~ = sum_j w_j Y_j alpha~_j
    std::vector<ComplexMatrix> alpha_t(n_pts);
    ComplexMatrix wt(n, l);
    for (index_t j = 0; j < n_pts; ++j) {
      const index_t pj = pf.pf->active[j];
      alpha_t[j] = pf.pf->rule.points[pj] * alpha[k][j];
      matmul_acc(wt, ys[j], alpha_t[j], pf.pf->rule.weights[pj]);
    }
    // block modified Gram-Schmidt against W_1..W_{k+1}
    for (index_t i = 0; i <= k; ++i) {
      ComplexMatrix hik = matmul_adjA(w_blocks[i], wt);
      for (index_t j = 0; j < n_pts; ++j) {
        ComplexMatrix upd = matmul(alpha[i][j], hik);
        alpha_t[j] = alpha_t[j] - upd;
      }
      matmul_acc(wt, w_blocks[i], hik, cxd(-1.0));
      for (index_t c = 0; c < l; ++c)
        for (index_t r2 = 0; r2 < l; ++r2)
          h(i * l + r2, k * l + c) = hik(r2, c);
    }
    if (k + 1 < m) {
      try {
        auto [wk1, hk1k] = qr_orthonormalize(wt);
        w_blocks.push_back(std::move(wk1));
        for (index_t c = 0; c < l; ++c)
          for (index_t r2 = 0; r2 < l; ++r2)
            h((k + 1) * l + r2, k * l + c) = hk1k(r2, c);
        // alpha_{k+1, j} = alpha~_j * H_{k+1,k}^-1
        LuFactorization hf = lu_factor(hk1k);
        alpha[k + 1].resize(n_pts);
        for (index_t j = 0; j < n_pts; ++j)
          alpha[k + 1][j] = lu_solve_right(hf, alpha_t[j]);
      } catch (const RankDeficient& e) {
        throw ArnoldiBreakdown(std::string("ss_arnoldi: basis expansion broke down: ") +
                               e.what());
      } catch (const SingularMatrix& e) {
        throw ArnoldiBreakdown(std::string("ss_arnoldi: H_{k+1,k} not invertible: ") +
                               e.what());
      }
    }
  }

  std::vector<Eigenpair> ritz = eig_dense(h);
  res.rank_used = l * m;

  ComplexMatrix w_all(n, l * m);
  for (index_t b = 0; b < m; ++b)
    for (index_t c = 0; c < l; ++c)
      std::copy(w_blocks[b].col(c), w_blocks[b].col(c) + n,
                w_all.col(b * l + c));
  detail::finalize_result(res, pencil, region, std::move(ritz), w_all);

  res.timing.t_other =
      detail::elapsed(t0) - res.timing.t_solve - (pf.built_here ? res.timing.t_lu : 0.0);
  if (res.timing.t_other < 0.0) res.timing.t_other = 0.0;
  res.timing.t_total = res.timing.t_lu + res.timing.t_solve + res.timing.t_other;
  return res;
}

/// Beyn's method for the linear pencil: Rayleigh-Ritz on the truncated
/// rank-revealing basis of S_0 against the implicit filtered operator.
/// Moment degree is always 1; a larger config value only earns a note.
inline EigenResult solve_beyn(const MatrixPencil& pencil,
                              const ContourRegion& region,
                              const SolverConfig& cfg,
                              const PointFactorizations* shared_pf = nullptr) {
  cfg.validate();
  EigenResult res;
  res.method = Method::beyn;
  if (cfg.m > 1)
    res.notes.push_back("beyn: M > 1 is not defined for this method; proceeding with M = 1");
  const auto t0 = detail::steady::now();

  detail::PfHolder pf = detail::ensure_factorizations(pencil, region, cfg, shared_pf);
  res.timing.t_lu = pf.pf->t_lu;

  std::mt19937_64 rng(cfg.seed);
  ComplexMatrix v = detail::make_start_block(cfg, pencil.dim(), rng);
  if (cfg.refine_ell > 1)
    v = refine_subspace(*pf.pf, v, cfg.refine_ell, res.timing.t_solve, cfg.moments);

  MomentStack stack = compute_moments(*pf.pf, v, 1, cfg.moments);
  res.timing.t_solve += stack.t_solve;

  SvdResult sv = svd(stack.block(0));
  const index_t mhat = sv.rank(cfg.rank_cutoff);
  if (mhat == 0) throw RankCollapse("beyn: S_0 has rank 0");
  res.rank_used = mhat;

  ComplexMatrix u1 = detail::left_columns(sv.u, mhat);
  ComplexMatrix w1s = detail::scale_columns_inv(sv.v, sv.singular_values, mhat);
  ComplexMatrix reduced = matmul_adjA(u1, matmul(stack.block(1), w1s));
  std::vector<Eigenpair> ritz = eig_dense(reduced);
  detail::finalize_result(res, pencil, region, std::move(ritz), u1);

  if (mhat == cfg.l && !res.pairs.empty())
    res.notes.push_back(
        "beyn: numerical rank equals L; the subspace may be undersized");

  res.timing.t_other =
      detail::elapsed(t0) - res.timing.t_solve - (pf.built_here ? res.timing.t_lu : 0.0);
  if (res.timing.t_other < 0.0) res.timing.t_other = 0.0;
  res.timing.t_total = res.timing.t_lu + res.timing.t_solve + res.timing.t_other;
  return res;
}

/// Block SS-Beyn: the M >= 2 extension of Beyn's reduction, Rayleigh-Ritz
/// on the truncated basis of the stacked moment matrix with the shifted
/// stack supplying the operator action.
inline EigenResult solve_ss_beyn(const MatrixPencil& pencil,
                                 const ContourRegion& region,
                                 const SolverConfig& cfg,
                                 const PointFactorizations* shared_pf = nullptr) {
  cfg.validate();
  if (cfg.m < 1) throw InvalidArgument("ss_beyn: M must be >= 1");
  EigenResult res;
  res.method = Method::ss_beyn;
  const auto t0 = detail::steady::now();

  detail::PfHolder pf = detail::ensure_factorizations(pencil, region, cfg, shared_pf);
  res.timing.t_lu = pf.pf->t_lu;

  std::mt19937_64 rng(cfg.seed);
  ComplexMatrix v = detail::make_start_block(cfg, pencil.dim(), rng);
  if (cfg.refine_ell > 1)
    v = refine_subspace(*pf.pf, v, cfg.refine_ell, res.timing.t_solve, cfg.moments);

  MomentStack stack = compute_moments(*pf.pf, v, cfg.m, cfg.moments);
  res.timing.t_solve += stack.t_solve;

  SvdResult sv = svd(stack.subspace(cfg.m));
  const index_t mhat = sv.rank(cfg.rank_cutoff);
  if (mhat == 0) throw RankCollapse("ss_beyn: moment subspace has rank 0");
  res.rank_used = mhat;

  ComplexMatrix u1 = detail::left_columns(sv.u, mhat);
  ComplexMatrix w1s = detail::scale_columns_inv(sv.v, sv.singular_values, mhat);
  ComplexMatrix reduced = matmul_adjA(u1, matmul(stack.shifted(cfg.m), w1s));
  std::vector<Eigenpair> ritz = eig_dense(reduced);
  detail::finalize_result(res, pencil, region, std::move(ritz), u1);

  res.timing.t_other =
      detail::elapsed(t0) - res.timing.t_solve - (pf.built_here ? res.timing.t_lu : 0.0);
  if (res.timing.t_other < 0.0) res.timing.t_other = 0.0;
  res.timing.t_total = res.timing.t_lu + res.timing.t_solve + res.timing.t_other;
  return res;
}

/// Dispatch by configured method.
inline EigenResult solve(const MatrixPencil& pencil, const ContourRegion& region,
                         const SolverConfig& cfg,
                         const PointFactorizations* shared_pf = nullptr) {
  switch (cfg.method) {
    case Method::ss_hankel: return solve_ss_hankel(pencil, region, cfg, nullptr, shared_pf);
    case Method::ss_rr: return solve_ss_rr(pencil, region, cfg, shared_pf);
    case Method::feast: return solve_feast(pencil, region, cfg, shared_pf);
    case Method::ss_arnoldi: return solve_ss_arnoldi(pencil, region, cfg, shared_pf);
    case Method::beyn: return solve_beyn(pencil, region, cfg, shared_pf);
    case Method::ss_beyn: return solve_ss_beyn(pencil, region, cfg, shared_pf);
  }
  throw InvalidArgument("unknown method");
}

}  // namespace cieig
