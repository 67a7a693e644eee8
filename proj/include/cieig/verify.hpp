// Copyright (c) 2026 The cieig developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "cieig/harness.hpp"

namespace cieig {

/// One verification check outcome. Skipped checks carry the reason.
struct VerifyCheck {
  std::string name;
  bool passed = false;
  bool skipped = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  std::vector<std::string> notes;  // recorded observations, never asserted

  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.skipped && !c.passed) return false;
    return true;
  }
};

struct VerifyConfig {
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  index_t n_points = 32;
  int threads = 1;
  bool inject_zero_weights = false;  // fault injection: break check (a)
};

namespace detail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

/// Orthonormal basis of the column span.
inline ComplexMatrix orthobasis(ConstMatView m) {
  auto [q, r] = qr_orthonormalize(m);
  return q;
}

/// || (I - Q Q^H) x ||_2 for unit x.
inline double projection_defect(const ComplexMatrix& q, std::span<const cxd> x) {
  std::vector<cxd> resid(x.begin(), x.end());
  for (index_t j = 0; j < q.cols(); ++j) {
    const cxd c = vec_dot_conj(q.col_span(j), {resid.data(), resid.size()});
    const cxd* qj = q.col(j);
    for (index_t i = 0; i < resid.size(); ++i) resid[i] -= c * qj[i];
  }
  return vec_norm(resid);
}

}  // namespace detail

/// Numerical checks of the structural claims the solvers rest on:
/// (a) the quadrature weight condition,
/// (b) the moment recurrence S_k = C S_{k-1} through k = N - eta,
/// (c) rank and span capture of the moment subspace,
/// (d) the Arnoldi / untruncated block Beyn equivalence,
/// (e) the filtered-iteration convergence slope (FEAST form),
/// (f) the non-diagonalizable slope bound with its polynomial factor.
inline VerifyReport verify_suite(const VerifyConfig& cfg = {}) {
  VerifyReport rep;
  const index_t n_pts = cfg.n_points;

  // ---- (a) weight condition -------------------------------------------
  bool weight_ok = true;
  {
    std::ostringstream detail_os;
    struct Case {
      ContourRegion region;
      const char* label;
    };
    const Case cases[] = {
        {ContourRegion::circle(cxd(0.0, 0.0), 1.0), "unit circle"},
        {ContourRegion::circle(cxd(0.3, 0.2), 1.7), "offset circle"},
        {ContourRegion::ellipse(cxd(0.0, 0.0), 1.0, 0.1), "flat ellipse"},
    };
    for (const auto& c : cases) {
      for (index_t n : {index_t(8), n_pts, index_t(64)}) {
        QuadratureRule rule = build_rule(c.region, RuleKind::trapezoidal, n);
        if (cfg.inject_zero_weights)
          for (cxd& w : rule.weights) w = cxd(0.0);
        const double tol = 1e-11 * double(n);
        WeightConditionReport wr = check_weight_condition(rule, tol);
        if (!wr.passes) {
          weight_ok = false;
          detail_os << c.label << " N=" << n << " worst k=" << wr.max_violation_k
                    << " scaled=" << detail::fmt(wr.max_abs)
                    << " |k=-1|=" << detail::fmt(std::abs(wr.k_minus1_value)) << "; ";
        }
      }
    }
    rep.checks.push_back({"weight_condition", weight_ok, false,
                          weight_ok ? "all trapezoidal rules satisfy the moment sums"
                                    : detail_os.str()});
  }
  if (!weight_ok) {
    // the remaining checks assume the condition; report them as skipped
    for (const char* name :
         {"moment_recurrence", "rank_and_span", "arnoldi_beyn_equivalence",
          "filtered_iteration_slope", "nondiagonalizable_slope_bound"})
      rep.checks.push_back({name, false, true, "skipped: weight condition failed"});
    return rep;
  }

  // ---- (b) moment recurrence on Jordan / infinite-eigenvalue pencils ---
  {
    bool ok = true;
    std::ostringstream os;
    struct Spec {
      const char* label;
      JordanSpec spec;
    };
    std::vector<Spec> specs;
    {
      JordanSpec s1;
      s1.blocks = {{false, cxd(0.3, 0.0), 2}, {false, cxd(0.5, 0.0), 1}};
      specs.push_back({"jordan", s1});
      JordanSpec s2;
      s2.blocks = {{false, cxd(0.3, 0.0), 2},
                   {false, cxd(0.5, 0.0), 1},
                   {true, cxd(0.0, 0.0), 2}};
      specs.push_back({"jordan+infinite", s2});
    }
    // contour chosen tight around the finite spectrum: the recurrence is an
    // exact identity, and a tight contour keeps the k-th moment magnitudes
    // commensurate with the summands so rounding stays below the tolerance
    const ContourRegion region = ContourRegion::circle(cxd(0.4, 0.0), 0.3);
    const QuadratureRule rule = build_rule(region, RuleKind::trapezoidal, n_pts);
    for (const auto& sc : specs) {
      const index_t eta = sc.spec.eta();
      const index_t k_max = n_pts - eta;
      for (std::uint64_t seed : cfg.seeds) {
        auto [pencil, truth] = gen_weierstrass(sc.spec, seed);
        MomentOptions mopts;
        mopts.threads = cfg.threads;
        PointFactorizations pf = factorize_points(pencil, rule, mopts);
        std::mt19937_64 rng(seed + 1000);
        ComplexMatrix v = random_real_gaussian(pencil.dim(), 2, rng);
        MomentStack stack = compute_moments(pf, v, k_max, mopts);
        ComplexMatrix c = truth.finite_part_operator();
        double worst = 0.0;
        for (index_t k = 1; k <= k_max; ++k) {
          ComplexMatrix sk = stack.block(k).to_matrix();
          ComplexMatrix csk = matmul(c, stack.block(k - 1));
          const double denom = norm_two(sk);
          const double rel = denom > 0.0 ? norm_two(sk - csk) / denom : 0.0;
          worst = std::max(worst, rel);
        }
        if (worst > 1e-9) ok = false;
        os << sc.label << " seed=" << seed << " k<=" << k_max
           << " worst=" << detail::fmt(worst) << "; ";
      }
    }
    rep.checks.push_back({"moment_recurrence", ok, false, os.str()});
  }

  // ---- (c) rank / span of the moment subspace --------------------------
  {
    bool ok = true;
    std::ostringstream os;
    const index_t n = 60, m_inside = 8;
    const ContourRegion region = ContourRegion::circle(cxd(0.0, 0.0), 1.0);
    for (std::uint64_t seed : cfg.seeds) {
      std::vector<double> eigs;
      std::mt19937_64 erng(seed * 77 + 5);
      std::uniform_real_distribution<double> uin(-0.5, 0.5), uout(2.0, 4.0);
      std::bernoulli_distribution sign(0.5);
      for (index_t i = 0; i < m_inside; ++i) eigs.push_back(uin(erng));
      for (index_t i = m_inside; i < n; ++i)
        eigs.push_back((sign(erng) ? 1.0 : -1.0) * uout(erng));
      auto [pencil, truth] = gen_symmetric_spectrum(eigs, seed);
      QuadratureRule rule = build_rule(region, RuleKind::trapezoidal, 64);
      MomentOptions mopts;
      mopts.threads = cfg.threads;
      PointFactorizations pf = factorize_points(pencil, rule, mopts);
      std::mt19937_64 rng(seed + 2000);
      ComplexMatrix v = random_real_gaussian(n, m_inside + 4, rng);
      MomentStack stack = compute_moments(pf, v, 1, mopts);
      SvdResult sv = svd(stack.block(0));
      index_t rank = 0;
      for (double s : sv.singular_values)
        if (s >= 1e-10 * sv.singular_values[0]) ++rank;
      double worst_defect = 0.0;
      ComplexMatrix basis = sv.u.columns(0, std::min<index_t>(rank, m_inside));
      for (const auto& fp : truth.finite) {
        if (!region.contains(fp.value)) continue;
        worst_defect = std::max(
            worst_defect, detail::projection_defect(basis, fp.eigenvector));
      }
      const bool rank_ok = rank == m_inside;
      const bool span_ok = worst_defect <= 1e-8;
      if (!rank_ok || !span_ok) ok = false;
      os << "seed=" << seed << " rank=" << rank << "/" << m_inside
         << " span defect=" << detail::fmt(worst_defect) << "; ";
    }
    rep.checks.push_back({"rank_and_span", ok, false, os.str()});
  }

  // ---- (d) Arnoldi vs untruncated block SS-Beyn ------------------------
  {
    bool ok = true;
    std::ostringstream os;
    for (std::uint64_t seed : cfg.seeds) {
      JordanSpec spec;
      std::mt19937_64 erng(seed * 31 + 7);
      std::uniform_real_distribution<double> ang(0.0, 6.283185307179586);
      std::uniform_real_distribution<double> rin(0.1, 0.7), rout(1.5, 3.0);
      for (index_t i = 0; i < 6; ++i) {
        const double r = rin(erng), t = ang(erng);
        spec.blocks.push_back({false, cxd(r * std::cos(t), r * std::sin(t)), 1});
      }
      for (index_t i = 0; i < 94; ++i) {
        const double r = rout(erng), t = ang(erng);
        spec.blocks.push_back({false, cxd(r * std::cos(t), r * std::sin(t)), 1});
      }
      auto [pencil, truth] = gen_weierstrass(spec, seed);
      const ContourRegion region = ContourRegion::circle(cxd(0.0, 0.0), 1.0);
      SolverConfig scfg;
      scfg.l = 5;
      scfg.m = 2;
      scfg.n_points = n_pts;
      scfg.seed = seed;
      scfg.moments.threads = cfg.threads;
      scfg.method = Method::ss_arnoldi;
      EigenResult arnoldi = solve_ss_arnoldi(pencil, region, scfg);
      scfg.method = Method::ss_beyn;
      scfg.rank_cutoff = 0.0;
      EigenResult beyn = solve_ss_beyn(pencil, region, scfg);
      std::vector<cxd> va, vb;
      for (const auto& p : arnoldi.pairs) va.push_back(p.value);
      for (const auto& p : beyn.pairs) vb.push_back(p.value);
      const bool match = multisets_match(va, vb, 1e-8);
      if (!match) ok = false;
      os << "seed=" << seed << (match ? " match" : " MISMATCH") << "; ";
    }
    rep.checks.push_back({"arnoldi_beyn_equivalence", ok, false, os.str()});
  }

  // ---- (e) filtered-iteration convergence slope (FEAST) ----------------
  {
    bool ok = true;
    std::ostringstream os;
    const ContourRegion region = ContourRegion::circle(cxd(0.0, 0.0), 1.0);
    const index_t n_filter = 16;
    for (std::uint64_t seed : cfg.seeds) {
      std::vector<double> eigs = {-0.3, 0.0, 0.3, 1.2};
      std::mt19937_64 erng(seed * 131 + 3);
      std::uniform_real_distribution<double> uout(2.5, 4.0);
      std::bernoulli_distribution sign(0.5);
      for (index_t i = 4; i < 40; ++i)
        eigs.push_back((sign(erng) ? 1.0 : -1.0) * uout(erng));
      auto [pencil, truth] = gen_symmetric_spectrum(eigs, seed);
      QuadratureRule rule = build_rule(region, RuleKind::trapezoidal, n_filter);
      double worst_inside_f = std::numeric_limits<double>::infinity();
      for (double lam : {-0.3, 0.0, 0.3})
        worst_inside_f =
            std::min(worst_inside_f, std::abs(filter_eval(rule, cxd(lam, 0.0))));
      const double ratio =
          std::abs(filter_eval(rule, cxd(1.2, 0.0))) / worst_inside_f;
      SolverConfig scfg;
      scfg.l = 3;
      scfg.m = 1;
      scfg.n_points = n_filter;
      scfg.seed = seed;
      scfg.max_feast_iters = 7;
      scfg.feast_tol = 1e-300;  // run the full window; slope is the subject
      scfg.moments.threads = cfg.threads;
      EigenResult res = solve_feast(pencil, region, scfg);
      double log_sum = 0.0;
      index_t count = 0;
      for (index_t k = 2; k + 1 <= 6 && k < res.residual_history.size(); ++k) {
        const double a = res.residual_history[k - 1];
        const double b = res.residual_history[k];
        if (a > 0.0 && b > 0.0) {
          log_sum += std::log(b / a);
          ++count;
        }
      }
      const double contraction = count ? std::exp(log_sum / double(count)) : 0.0;
      const bool in_band = contraction >= ratio / 3.0 && contraction <= 3.0 * ratio;
      if (!in_band) ok = false;
      os << "seed=" << seed << " ratio=" << detail::fmt(ratio)
         << " contraction=" << detail::fmt(contraction) << "; ";
    }
    rep.checks.push_back({"filtered_iteration_slope", ok, false, os.str()});
  }

  // ---- (f) non-diagonalizable slope bound ------------------------------
  {
    bool ok = true;
    std::ostringstream os;
    const ContourRegion region = ContourRegion::circle(cxd(0.0, 0.0), 1.0);
    const index_t n_filter = 8;
    for (std::uint64_t seed : cfg.seeds) {
      JordanSpec spec;
      spec.blocks = {{false, cxd(0.3, 0.0), 2},
                     {false, cxd(1.4, 0.0), 1},
                     {false, cxd(2.0, 0.0), 1},
                     {false, cxd(2.6, 0.0), 1}};
      auto [pencil, truth] = gen_weierstrass(spec, seed);
      QuadratureRule rule = build_rule(region, RuleKind::trapezoidal, n_filter);
      MomentOptions mopts;
      mopts.threads = cfg.threads;
      PointFactorizations pf = factorize_points(pencil, rule, mopts);
      // L*M = 3 covers the 0.3 chain and 1.4; the dominant excluded
      // eigenvalue is 2.0
      const double ratio = std::abs(filter_eval(rule, cxd(2.0, 0.0))) /
                           std::abs(filter_eval(rule, cxd(0.3, 0.0)));
      const index_t eta_jordan = truth.jordan.max_block_size();
      const double alpha_prime =
          2.0 * norm_two(truth.q) * norm_two(truth.qtilde);
      std::mt19937_64 rng(seed + 3000);
      ComplexMatrix v0 = random_real_gaussian(pencil.dim(), 3, rng);
      const std::vector<cxd>& x = truth.finite[0].eigenvector;  // lambda = 0.3
      std::vector<double> defect(7, 0.0);
      double t_solve = 0.0;
      for (index_t ell = 1; ell <= 6; ++ell) {
        ComplexMatrix seed_block = refine_subspace(pf, v0, ell, t_solve, mopts);
        ComplexMatrix filtered = apply_filter(pf, seed_block, t_solve, mopts);
        ComplexMatrix basis = detail::orthobasis(filtered);
        defect[ell] = detail::projection_defect(basis, x);
      }
      // calibrate the bound constant at ell = 1, then require
      // log e(ell) <= log(alpha' beta) + (eta-1) log ell + ell log r + 2
      const double log_ab = std::log(defect[1]) - std::log(ratio);
      bool bound_ok = true;
      for (index_t ell = 2; ell <= 6; ++ell) {
        if (defect[ell] <= 0.0) continue;
        const double bound = log_ab + double(eta_jordan - 1) * std::log(double(ell)) +
                             double(ell) * std::log(ratio) + 2.0;
        if (std::log(defect[ell]) > bound) bound_ok = false;
      }
      if (!bound_ok) ok = false;
      os << "seed=" << seed << " eta=" << eta_jordan
         << " r=" << detail::fmt(ratio) << " e(1)=" << detail::fmt(defect[1])
         << " e(6)=" << detail::fmt(defect[6])
         << " alpha'=" << detail::fmt(alpha_prime)
         << (bound_ok ? " within bound" : " EXCEEDS bound") << "; ";
    }
    rep.checks.push_back({"nondiagonalizable_slope_bound", ok, false, os.str()});
  }

  // ---- recorded boundary behavior (never asserted) ----------------------
  {
    // the Toeplitz identity T(f_k) = J^k T(f_0) is proven for k <= N-1;
    // record its defect at the first index past the range
    const QuadratureRule rule =
        build_rule(ContourRegion::circle(cxd(0.0, 0.0), 1.0),
                   RuleKind::trapezoidal, 8);
    const cxd lambda(0.4, 0.0);
    const index_t bs = 3;
    auto toeplitz = [&](const std::vector<cxd>& row) {
      ComplexMatrix t(bs, bs);
      for (index_t i = 0; i < bs; ++i)
        for (index_t j = i; j < bs; ++j) t(i, j) = row[j - i];
      return t;
    };
    ComplexMatrix jb = jordan_block(lambda, bs);
    ComplexMatrix jk = ComplexMatrix::identity(bs);
    for (index_t q = 0; q < rule.size(); ++q) jk = matmul(jk, jb);
    ComplexMatrix lhs = toeplitz(fk_vector(rule, lambda, bs, rule.size()));
    ComplexMatrix rhs = matmul(jk, toeplitz(fk_vector(rule, lambda, bs, 0)));
    const double defect = norm_max(lhs - rhs) / std::max(norm_max(lhs), 1e-300);
    rep.notes.push_back(
        "toeplitz filter identity at the boundary index k=N: relative defect " +
        detail::fmt(defect) + " (expected to fail; proven only for k <= N-1)");
  }

  return rep;
}

inline std::string format_verify_report(const VerifyReport& rep) {
  std::ostringstream os;
  for (const auto& c : rep.checks) {
    os << (c.skipped ? "SKIP" : (c.passed ? "PASS" : "FAIL")) << "  " << c.name;
    if (!c.detail.empty()) os << ": " << c.detail;
    os << "\n";
  }
  for (const auto& n : rep.notes) os << "NOTE  " << n << "\n";
  os << (rep.all_passed() ? "verification suite: all checks passed"
                          : "verification suite: FAILURES present")
     << "\n";
  return os.str();
}

}  // namespace cieig
