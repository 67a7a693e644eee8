// Copyright (c) 2026 The cieig developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <utility>

#include "cieig/matrix.hpp"

namespace cieig {

/// The pair (A, B) of the generalized problem A x = lambda B x, with
/// structure flags. Flags are validated on construction: a Hermitian flag
/// requires the matrix to actually be Hermitian to 1e-12 relative.
struct MatrixPencil {
  ComplexMatrix a;
  ComplexMatrix b;
  bool hermitian_a = false;
  bool hpd_b = false;
  bool b_is_identity = false;

  index_t dim() const { return a.rows(); }

  bool is_real() const { return a.is_real() && b.is_real(); }
};

namespace detail {

inline bool is_hermitian(const ComplexMatrix& m, double rel_tol) {
  const double scale = norm_max(m);
  const double tol = rel_tol * (scale > 0.0 ? scale : 1.0);
  for (index_t j = 0; j < m.cols(); ++j)
    for (index_t i = 0; i <= j; ++i)
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
  return true;
}

}  // namespace detail

inline MatrixPencil make_pencil(ComplexMatrix a, ComplexMatrix b,
                                bool hermitian_a = false, bool hpd_b = false,
                                bool b_is_identity = false) {
  if (a.rows() != a.cols() || b.rows() != b.cols())
    throw DimensionMismatch("make_pencil: A and B must be square");
  if (a.rows() != b.rows())
    throw DimensionMismatch("make_pencil: A and B must have the same dimension");
  if (hermitian_a && !detail::is_hermitian(a, 1e-12))
    throw InvalidArgument("make_pencil: hermitian_A flag set but A is not Hermitian");
  if (hpd_b && !detail::is_hermitian(b, 1e-12))
    throw InvalidArgument("make_pencil: hpd_B flag set but B is not Hermitian");
  MatrixPencil p;
  p.a = std::move(a);
  p.b = std::move(b);
  p.hermitian_a = hermitian_a;
  p.hpd_b = hpd_b;
  p.b_is_identity = b_is_identity;
  return p;
}

/// Standard problem A x = lambda x.
inline MatrixPencil make_standard_pencil(ComplexMatrix a, bool hermitian_a = false) {
  const index_t n = a.rows();
  return make_pencil(std::move(a), ComplexMatrix::identity(n), hermitian_a,
                     hermitian_a, true);
}

}  // namespace cieig
