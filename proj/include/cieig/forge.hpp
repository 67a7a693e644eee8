// Copyright (c) 2026 The cieig developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cieig/contour.hpp"
#include "cieig/eig.hpp"
#include "cieig/lu.hpp"
#include "cieig/pencil.hpp"
#include "cieig/qr.hpp"
#include "cieig/svd.hpp"

namespace cieig {

/// One block of a Weierstrass structure specification: either a finite
/// eigenvalue Jordan block or an infinite-eigenvalue (nilpotent B) block.
struct JordanBlockSpec {
  bool infinite = false;
  cxd eigenvalue{0.0, 0.0};
  index_t size = 1;
};

/// Ground-truth spectral structure for generated problems.
struct JordanSpec {
  std::vector<JordanBlockSpec> blocks;
  double conditioning = 10.0;  // target condition number of the transform Q

  index_t dim() const {
    index_t n = 0;
    for (const auto& b : blocks) n += b.size;
    return n;
  }
  /// Largest infinite-eigenvalue block size; 1 when there is none.
  index_t eta() const {
    index_t e = 1;
    for (const auto& b : blocks)
      if (b.infinite) e = std::max(e, b.size);
    return e;
  }
  /// Largest Jordan block size over every block (the growth exponent of
  /// the iteration error bounds).
  index_t max_block_size() const {
    index_t e = 1;
    for (const auto& b : blocks) e = std::max(e, b.size);
    return e;
  }
  bool has_infinite() const {
    for (const auto& b : blocks)
      if (b.infinite) return true;
    return false;
  }
  bool real_spectrum() const {
    for (const auto& b : blocks)
      if (!b.infinite && b.eigenvalue.imag() != 0.0) return false;
    return true;
  }
};

struct FinitePair {
  cxd value;
  index_t multiplicity;         // block size
  std::vector<cxd> eigenvector; // unit 2-norm
};

/// Q, Qtilde (Qtilde^H = Q^-1), Ptilde and the block layout of a
/// generated pencil; the independent reference every verification check
/// leans on.
struct GroundTruth {
  ComplexMatrix q;
  ComplexMatrix qtilde;
  ComplexMatrix ptilde;
  JordanSpec jordan;
  std::vector<FinitePair> finite;
  std::vector<index_t> block_offsets;  // start column of each block in Q

  /// The finite-spectrum operator Q_f J_f Qtilde_f^H whose standard
  /// eigenproblem the moment subspaces implicitly solve.
  ComplexMatrix finite_part_operator() const {
    const index_t n = q.rows();
    ComplexMatrix qj(n, 0);
    // Build Q_f * J_f column block by column block, then multiply by
    // Qtilde_f^H. J acts within each block: column c of Q*J is
    // lambda*q_c + q_{c-1} (superdiagonal ones).
    std::vector<index_t> fin_cols;
    for (index_t bi = 0; bi < jordan.blocks.size(); ++bi)
      if (!jordan.blocks[bi].infinite)
        for (index_t c = 0; c < jordan.blocks[bi].size; ++c)
          fin_cols.push_back(block_offsets[bi] + c);
    const index_t r = fin_cols.size();
    ComplexMatrix qf(n, r), qjf(n, r), qtf(n, r);
    index_t col = 0;
    for (index_t bi = 0; bi < jordan.blocks.size(); ++bi) {
      const auto& blk = jordan.blocks[bi];
      if (blk.infinite) continue;
      const index_t off = block_offsets[bi];
      for (index_t c = 0; c < blk.size; ++c, ++col) {
        std::copy(q.col(off + c), q.col(off + c) + n, qf.col(col));
        std::copy(qtilde.col(off + c), qtilde.col(off + c) + n, qtf.col(col));
        // column c of Q_i J_i is lambda q_c + q_{c-1} (superdiagonal ones)
        for (index_t i = 0; i < n; ++i) {
          cxd v = blk.eigenvalue * q(i, off + c);
          if (c > 0) v += q(i, off + c - 1);
          qjf(i, col) = v;
        }
      }
    }
    // C = (Q_f J_f) * Qtilde_f^H
    ComplexMatrix c(n, n);
    matmul_acc(c, qjf, adjoint(qtf));
    return c;
  }

  /// Exact filtered moment Q_O J_O^k Qtilde_O^H V over the blocks whose
  /// finite eigenvalue lies in the region.
  ComplexMatrix exact_moment(const ContourRegion& region, ConstMatView v,
                             index_t k) const {
    const index_t n = q.rows();
    ComplexMatrix out(n, v.cols);
    for (index_t bi = 0; bi < jordan.blocks.size(); ++bi) {
      const auto& blk = jordan.blocks[bi];
      if (blk.infinite || !region.contains(blk.eigenvalue)) continue;
      const index_t off = block_offsets[bi];
      const index_t s = blk.size;
      // W = Qtilde_i^H V  (s x L)
      ComplexMatrix qti(n, s);
      for (index_t c = 0; c < s; ++c)
        std::copy(qtilde.col(off + c), qtilde.col(off + c) + n, qti.col(c));
      ComplexMatrix w = matmul_adjA(qti, v);
      // w <- J^k w using the Jordan action k times
      for (index_t rep = 0; rep < k; ++rep) {
        for (index_t j = 0; j < w.cols(); ++j) {
          for (index_t i = 0; i < s; ++i) {
            cxd val = blk.eigenvalue * w(i, j);
            if (i + 1 < s) val += w(i + 1, j);
            w(i, j) = val;
          }
        }
      }
      // out += Q_i w
      ComplexMatrix qi(n, s);
      for (index_t c = 0; c < s; ++c)
        std::copy(q.col(off + c), q.col(off + c) + n, qi.col(c));
      matmul_acc(out, qi, w);
    }
    return out;
  }

  /// Columns of Q for in-region finite blocks (spans the target
  /// eigvector space together with the Jordan chains).
  ComplexMatrix region_basis(const ContourRegion& region) const {
    const index_t n = q.rows();
    std::vector<index_t> cols;
    for (index_t bi = 0; bi < jordan.blocks.size(); ++bi) {
      const auto& blk = jordan.blocks[bi];
      if (blk.infinite || !region.contains(blk.eigenvalue)) continue;
      for (index_t c = 0; c < blk.size; ++c) cols.push_back(block_offsets[bi] + c);
    }
    ComplexMatrix out(n, cols.size());
    for (index_t j = 0; j < cols.size(); ++j)
      std::copy(q.col(cols[j]), q.col(cols[j]) + n, out.col(j));
    return out;
  }

  /// In-region finite eigenvalue count (with multiplicity).
  index_t in_region_count(const ContourRegion& region) const {
    index_t m = 0;
    for (const auto& blk : jordan.blocks)
      if (!blk.infinite && region.contains(blk.eigenvalue)) m += blk.size;
    return m;
  }
};

// ---------------------------------------------------------------------------
// canonical blocks

inline ComplexMatrix jordan_block(cxd lambda, index_t size) {
  ComplexMatrix j(size, size);
  for (index_t i = 0; i < size; ++i) {
    j(i, i) = lambda;
    if (i + 1 < size) j(i, i + 1) = 1.0;
  }
  return j;
}

namespace detail {

// A_c = (+) J(lambda_i)  (+) I ;  B_c = (+) I  (+) J(0)
inline void weierstrass_canonical(const JordanSpec& spec, ComplexMatrix& a_c,
                                  ComplexMatrix& b_c) {
  const index_t n = spec.dim();
  a_c = ComplexMatrix(n, n);
  b_c = ComplexMatrix(n, n);
  index_t off = 0;
  for (const auto& blk : spec.blocks) {
    for (index_t i = 0; i < blk.size; ++i) {
      if (blk.infinite) {
        a_c(off + i, off + i) = 1.0;
        if (i + 1 < blk.size) b_c(off + i, off + i + 1) = 1.0;
      } else {
        a_c(off + i, off + i) = blk.eigenvalue;
        if (i + 1 < blk.size) a_c(off + i, off + i + 1) = 1.0;
        b_c(off + i, off + i) = 1.0;
      }
    }
    off += blk.size;
  }
}

// Well-conditioned random transform: orthonormal factor times geometric
// diagonal scaling with cond(T) = target. Returns T and its exact inverse.
inline std::pair<ComplexMatrix, ComplexMatrix> random_transform(
    index_t n, double cond, bool real, std::mt19937_64& rng) {
  ComplexMatrix g = real ? random_real_gaussian(n, n, rng)
                         : random_complex_gaussian(n, n, rng);
  auto [u, r] = qr_orthonormalize(g);
  const double lo = 1.0 / std::sqrt(cond);
  const double hi = std::sqrt(cond);
  ComplexMatrix t(n, n), tinv(n, n);
  for (index_t j = 0; j < n; ++j) {
    const double s =
        (n > 1) ? lo * std::pow(hi / lo, double(j) / double(n - 1)) : 1.0;
    for (index_t i = 0; i < n; ++i) {
      t(i, j) = u(i, j) * s;
      tinv(j, i) = std::conj(u(i, j)) / s;  // T^-1 = D^-1 U^H
    }
  }
  return {std::move(t), std::move(tinv)};
}

}  // namespace detail

/// Assemble a pencil with the exact Weierstrass structure of `spec`:
/// Ptilde^H (zB - A) Q equals the canonical block-diagonal form.
inline std::pair<MatrixPencil, GroundTruth> gen_weierstrass(
    const JordanSpec& spec, std::uint64_t seed) {
  const index_t n = spec.dim();
  if (n == 0) throw BadSpec("gen_weierstrass: empty spec");
  for (const auto& blk : spec.blocks)
    if (blk.size < 1) throw BadSpec("gen_weierstrass: block size must be >= 1");
  if (!(spec.conditioning >= 1.0))
    throw BadSpec("gen_weierstrass: conditioning must be >= 1");

  std::mt19937_64 rng(seed);
  const bool real = spec.real_spectrum();
  ComplexMatrix a_c, b_c;
  detail::weierstrass_canonical(spec, a_c, b_c);

  auto [q, q_inv] = detail::random_transform(n, spec.conditioning, real, rng);
  auto [p, p_inv] = detail::random_transform(n, spec.conditioning, real, rng);

  // A = P A_c Q^-1, B = P B_c Q^-1  (so Ptilde^H (zB-A) Q is canonical)
  ComplexMatrix a = matmul(matmul(p, a_c), q_inv);
  ComplexMatrix b = matmul(matmul(p, b_c), q_inv);

  GroundTruth truth;
  truth.q = q;
  truth.qtilde = adjoint(q_inv);
  truth.ptilde = adjoint(p_inv);
  truth.jordan = spec;
  index_t off = 0;
  for (const auto& blk : spec.blocks) {
    truth.block_offsets.push_back(off);
    if (!blk.infinite) {
      FinitePair fp;
      fp.value = blk.eigenvalue;
      fp.multiplicity = blk.size;
      fp.eigenvector.assign(q.col(off), q.col(off) + n);
      const double nrm = vec_norm(fp.eigenvector);
      for (cxd& x : fp.eigenvector) x /= nrm;
      truth.finite.push_back(std::move(fp));
    }
    off += blk.size;
  }

  MatrixPencil pencil = make_pencil(std::move(a), std::move(b));
  return {std::move(pencil), std::move(truth)};
}

/// Real symmetric A with HPD B and a fully prescribed real spectrum.
inline std::pair<MatrixPencil, GroundTruth> gen_symmetric_spectrum(
    const std::vector<double>& eigenvalues, std::uint64_t seed,
    double cond_b = 10.0) {
  const index_t n = eigenvalues.size();
  if (n == 0) throw BadSpec("gen_symmetric_spectrum: empty spectrum");
  std::mt19937_64 rng(seed);

  auto [uq, ur] = qr_orthonormalize(random_real_gaussian(n, n, rng));
  ComplexMatrix& u = uq;  // orthogonal
  auto [og, orr] = qr_orthonormalize(random_real_gaussian(n, n, rng));
  ComplexMatrix& o = og;  // orthogonal factor of R = D O

  const double dlo = std::pow(cond_b, -0.25), dhi = std::pow(cond_b, 0.25);
  std::vector<double> d(n, 1.0);
  for (index_t i = 0; i < n; ++i)
    d[i] = (n > 1) ? dlo * std::pow(dhi / dlo, double(i) / double(n - 1)) : 1.0;

  // M = U^T diag(eig) U, exactly symmetrized
  ComplexMatrix lam_u(n, n);
  for (index_t j = 0; j < n; ++j)
    for (index_t i = 0; i < n; ++i) lam_u(i, j) = eigenvalues[i] * u(i, j);
  ComplexMatrix m = matmul_adjA(u, lam_u);
  for (index_t j = 0; j < n; ++j)
    for (index_t i = 0; i < j; ++i) {
      const cxd s = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = m(j, i) = s;
    }

  // R = D O ; A = R^T M R ; B = R^T R = O^T D^2 O
  ComplexMatrix r(n, n);
  for (index_t j = 0; j < n; ++j)
    for (index_t i = 0; i < n; ++i) r(i, j) = d[i] * o(i, j);
  ComplexMatrix rt = transpose(r);
  ComplexMatrix a = matmul(rt, matmul(m, r));
  ComplexMatrix b = matmul(rt, r);
  for (index_t j = 0; j < n; ++j)
    for (index_t i = 0; i < j; ++i) {
      const cxd sa = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = a(j, i) = sa;
      const cxd sb = 0.5 * (b(i, j) + b(j, i));
      b(i, j) = b(j, i) = sb;
    }

  GroundTruth truth;
  // Q = R^-1 U^T = O^T D^-1 U^T ; Qtilde^H = U D O
  ComplexMatrix dinv_ut(n, n);
  for (index_t j = 0; j < n; ++j)
    for (index_t i = 0; i < n; ++i) dinv_ut(i, j) = u(j, i) / d[i];
  truth.q = matmul_adjA(o, dinv_ut);  // o real: adjoint == transpose
  ComplexMatrix d_ut(n, n);
  for (index_t j = 0; j < n; ++j)
    for (index_t i = 0; i < n; ++i) d_ut(i, j) = u(j, i) * d[i];
  truth.qtilde = matmul_adjA(o, d_ut);  // Qtilde = O^T D U^T (real)
  truth.ptilde = truth.q;               // symmetric pencil: left = right
  for (index_t i = 0; i < n; ++i) {
    truth.jordan.blocks.push_back({false, cxd(eigenvalues[i], 0.0), 1});
    truth.block_offsets.push_back(i);
    FinitePair fp;
    fp.value = cxd(eigenvalues[i], 0.0);
    fp.multiplicity = 1;
    fp.eigenvector.assign(truth.q.col(i), truth.q.col(i) + n);
    const double nrm = vec_norm(fp.eigenvector);
    for (cxd& x : fp.eigenvector) x /= nrm;
    truth.finite.push_back(std::move(fp));
  }

  MatrixPencil pencil = make_pencil(std::move(a), std::move(b), true, true);
  return {std::move(pencil), std::move(truth)};
}

/// Dense symmetric test problem: m eigenvalues uniform in
/// [inside_lo, inside_hi], the rest with magnitudes uniform in
/// [outside_lo, outside_hi] and random sign.
inline std::pair<MatrixPencil, GroundTruth> gen_symmetric_dense(
    index_t n, index_t m, double inside_lo, double inside_hi,
    double outside_lo, double outside_hi, std::uint64_t seed) {
  if (m > n) throw BadSpec("gen_symmetric_dense: m must be <= n");
  if (!(inside_lo < inside_hi) || !(outside_lo < outside_hi) || !(outside_lo > 0.0))
    throw BadSpec("gen_symmetric_dense: bad interval specification");
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> uin(inside_lo, inside_hi);
  std::uniform_real_distribution<double> uout(outside_lo, outside_hi);
  std::bernoulli_distribution sign(0.5);
  std::vector<double> eigs(n);
  for (index_t i = 0; i < m; ++i) eigs[i] = uin(rng);
  for (index_t i = m; i < n; ++i) eigs[i] = (sign(rng) ? 1.0 : -1.0) * uout(rng);
  return gen_symmetric_spectrum(eigs, seed);
}

// ---------------------------------------------------------------------------
// dense oracle

struct OraclePair {
  cxd value;
  std::vector<cxd> vector;
  index_t multiplicity = 1;
};

namespace detail {

inline std::vector<OraclePair> cluster_pairs(std::vector<OraclePair> raw,
                                             double tol) {
  std::sort(raw.begin(), raw.end(), [](const OraclePair& a, const OraclePair& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  std::vector<OraclePair> out;
  for (auto& p : raw) {
    if (!out.empty() && std::abs(out.back().value - p.value) <= tol)
      out.back().multiplicity += p.multiplicity;
    else
      out.push_back(std::move(p));
  }
  return out;
}

}  // namespace detail

inline constexpr double kOracleClusterTol = 1e-8;

/// Independent reference spectrum inside the region: a dense eigensolve of
/// B^-1 A when B is invertible, the generated ground truth otherwise.
inline std::vector<OraclePair> dense_oracle(const MatrixPencil& pencil,
                                            const ContourRegion& region,
                                            const GroundTruth* truth = nullptr,
                                            const EigOptions& opt = {}) {
  bool b_singular = false;
  LuFactorization f;
  try {
    f = lu_factor(pencil.b);
    if (f.recip_cond < 1e-12) b_singular = true;
  } catch (const SingularMatrix&) {
    b_singular = true;
  }

  std::vector<OraclePair> raw;
  if (!b_singular) {
    ComplexMatrix x = lu_solve(f, pencil.a);
    for (auto& ep : eig_dense(x, opt)) {
      if (!region.contains(ep.value)) continue;
      raw.push_back({ep.value, std::move(ep.vector), 1});
    }
  } else {
    if (truth == nullptr)
      throw SingularBWithoutTruth(
          "dense_oracle: B is singular and no ground truth is attached");
    for (const auto& fp : truth->finite) {
      if (!region.contains(fp.value)) continue;
      raw.push_back({fp.value, fp.eigenvector, fp.multiplicity});
    }
  }
  return detail::cluster_pairs(std::move(raw), kOracleClusterTol);
}

// ---------------------------------------------------------------------------
// spec serialization, "(re,im,size);(INF,size)"

inline std::string format_jordan_spec(const JordanSpec& spec) {
  std::ostringstream os;
  for (index_t i = 0; i < spec.blocks.size(); ++i) {
    if (i) os << ';';
    const auto& b = spec.blocks[i];
    if (b.infinite)
      os << "(INF," << b.size << ')';
    else
      os << '(' << b.eigenvalue.real() << ',' << b.eigenvalue.imag() << ','
         << b.size << ')';
  }
  return os.str();
}

inline JordanSpec parse_jordan_spec(const std::string& text) {
  JordanSpec spec;
  index_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] == ';' || text[pos] == ' ') { ++pos; continue; }
    if (text[pos] != '(') throw BadSpec("jordan spec: expected '(' in \"" + text + "\"");
    const index_t close = text.find(')', pos);
    if (close == std::string::npos) throw BadSpec("jordan spec: missing ')'");
    std::string body = text.substr(pos + 1, close - pos - 1);
    for (char& c : body)
      if (c == ',') c = ' ';
    std::istringstream is(body);
    JordanBlockSpec blk;
    std::string first;
    is >> first;
    if (first == "INF" || first == "inf" || first == "Inf") {
      blk.infinite = true;
      if (!(is >> blk.size)) throw BadSpec("jordan spec: bad INF block");
    } else {
      double re = 0.0, im = 0.0;
      try {
        re = std::stod(first);
      } catch (...) {
        throw BadSpec("jordan spec: bad eigenvalue \"" + first + "\"");
      }
      if (!(is >> im >> blk.size)) throw BadSpec("jordan spec: bad block body");
      blk.eigenvalue = cxd(re, im);
    }
    if (blk.size < 1) throw BadSpec("jordan spec: block size must be >= 1");
    spec.blocks.push_back(blk);
    pos = close + 1;
  }
  if (spec.blocks.empty()) throw BadSpec("jordan spec: no blocks in \"" + text + "\"");
  return spec;
}

}  // namespace cieig
