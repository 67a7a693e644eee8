// Copyright (c) 2026 The cieig developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "cieig/errors.hpp"

namespace cieig {

using cxd = std::complex<double>;
using index_t = std::size_t;

/// Dense complex matrix, column-major storage.
///
/// Column-major is fixed so that block-column slicing (moment stacks,
/// basis matrices) is contiguous and can be exposed as views without
/// copying.
class ComplexMatrix {
public:
  ComplexMatrix() : rows_(0), cols_(0) {}

  ComplexMatrix(index_t rows, index_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, cxd(0.0, 0.0)) {}

  /// Construct from column-major data; validates that every entry is finite.
  ComplexMatrix(index_t rows, index_t cols, std::vector<cxd> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw DimensionMismatch("matrix data size does not match rows*cols");
    for (const cxd& v : data_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw InvalidArgument("matrix entry is not finite");
  }

  index_t rows() const { return rows_; }
  index_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  cxd& operator()(index_t i, index_t j) { return data_[i + j * rows_]; }
  const cxd& operator()(index_t i, index_t j) const {
    return data_[i + j * rows_];
  }

  cxd* data() { return data_.data(); }
  const cxd* data() const { return data_.data(); }

  cxd* col(index_t j) { return data_.data() + j * rows_; }
  const cxd* col(index_t j) const { return data_.data() + j * rows_; }

  std::span<cxd> col_span(index_t j) { return {col(j), rows_}; }
  std::span<const cxd> col_span(index_t j) const { return {col(j), rows_}; }

  void set_zero() { std::fill(data_.begin(), data_.end(), cxd(0.0)); }

  bool all_finite() const {
    for (const cxd& v : data_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }

  bool is_real(double tol = 0.0) const {
    for (const cxd& v : data_)
      if (std::abs(v.imag()) > tol) return false;
    return true;
  }

  static ComplexMatrix identity(index_t n) {
    ComplexMatrix m(n, n);
    for (index_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  /// Columns [c0, c0+count) as a new matrix.
  ComplexMatrix columns(index_t c0, index_t count) const {
    if (c0 + count > cols_) throw DimensionMismatch("column range out of bounds");
    ComplexMatrix out(rows_, count);
    std::copy(col(c0), col(c0 + count), out.data());
    return out;
  }

  void set_column(index_t j, std::span<const cxd> v) {
    std::copy(v.begin(), v.end(), col(j));
  }

private:
  index_t rows_, cols_;
  std::vector<cxd> data_;
};

/// Read-only view of a column-major block with leading dimension `ld`.
/// ComplexMatrix converts implicitly; moment stacks hand out sub-block
/// views without copying.
struct ConstMatView {
  const cxd* data = nullptr;
  index_t rows = 0, cols = 0, ld = 0;

  ConstMatView() = default;
  ConstMatView(const cxd* d, index_t r, index_t c, index_t l)
      : data(d), rows(r), cols(c), ld(l) {}
  ConstMatView(const ComplexMatrix& m)  // NOLINT: implicit by design
      : data(m.data()), rows(m.rows()), cols(m.cols()), ld(m.rows()) {}

  const cxd& operator()(index_t i, index_t j) const { return data[i + j * ld]; }
  const cxd* col(index_t j) const { return data + j * ld; }

  ComplexMatrix to_matrix() const {
    ComplexMatrix out(rows, cols);
    for (index_t j = 0; j < cols; ++j)
      std::copy(col(j), col(j) + rows, out.col(j));
    return out;
  }
};

// ---------------------------------------------------------------------------
// element-wise helpers

inline ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("matrix add: shape mismatch");
  ComplexMatrix c(a.rows(), a.cols());
  for (index_t k = 0; k < a.rows() * a.cols(); ++k) c.data()[k] = a.data()[k] + b.data()[k];
  return c;
}

inline ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("matrix sub: shape mismatch");
  ComplexMatrix c(a.rows(), a.cols());
  for (index_t k = 0; k < a.rows() * a.cols(); ++k) c.data()[k] = a.data()[k] - b.data()[k];
  return c;
}

inline ComplexMatrix operator*(const cxd& s, const ComplexMatrix& a) {
  ComplexMatrix c(a.rows(), a.cols());
  for (index_t k = 0; k < a.rows() * a.cols(); ++k) c.data()[k] = s * a.data()[k];
  return c;
}

inline ComplexMatrix adjoint(ConstMatView a) {
  ComplexMatrix c(a.cols, a.rows);
  for (index_t j = 0; j < a.cols; ++j)
    for (index_t i = 0; i < a.rows; ++i) c(j, i) = std::conj(a(i, j));
  return c;
}

inline ComplexMatrix transpose(ConstMatView a) {
  ComplexMatrix c(a.cols, a.rows);
  for (index_t j = 0; j < a.cols; ++j)
    for (index_t i = 0; i < a.rows; ++i) c(j, i) = a(i, j);
  return c;
}

// ---------------------------------------------------------------------------
// norms

inline double norm_max(ConstMatView a) {
  double m = 0.0;
  for (index_t j = 0; j < a.cols; ++j)
    for (index_t i = 0; i < a.rows; ++i) m = std::max(m, std::abs(a(i, j)));
  return m;
}

inline double norm_fro(ConstMatView a) {
  double s = 0.0;
  for (index_t j = 0; j < a.cols; ++j)
    for (index_t i = 0; i < a.rows; ++i) s += std::norm(a(i, j));
  return std::sqrt(s);
}

inline double norm_one(ConstMatView a) {
  double m = 0.0;
  for (index_t j = 0; j < a.cols; ++j) {
    double s = 0.0;
    for (index_t i = 0; i < a.rows; ++i) s += std::abs(a(i, j));
    m = std::max(m, s);
  }
  return m;
}

inline double vec_norm(std::span<const cxd> v) {
  double s = 0.0;
  for (const cxd& x : v) s += std::norm(x);
  return std::sqrt(s);
}

inline void vec_scale(std::span<cxd> v, cxd s) {
  for (cxd& x : v) x *= s;
}

inline cxd vec_dot_conj(std::span<const cxd> a, std::span<const cxd> b) {
  cxd s(0.0);
  for (index_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// ---------------------------------------------------------------------------
// multiplication kernels
//
// jki loop order keeps every inner loop streaming down a column; good
// enough at the dense sizes this library targets (n up to a few thousand).

/// C += alpha * A * B
inline void matmul_acc(ComplexMatrix& c, ConstMatView a, ConstMatView b,
                       cxd alpha = cxd(1.0)) {
  if (a.cols != b.rows || c.rows() != a.rows || c.cols() != b.cols)
    throw DimensionMismatch("matmul: shape mismatch");
  const index_t m = a.rows, k = a.cols, n = b.cols;
  for (index_t j = 0; j < n; ++j) {
    cxd* cj = c.col(j);
    for (index_t p = 0; p < k; ++p) {
      const cxd f = alpha * b(p, j);
      if (f == cxd(0.0)) continue;
      const cxd* ap = a.col(p);
      for (index_t i = 0; i < m; ++i) cj[i] += f * ap[i];
    }
  }
}

inline ComplexMatrix matmul(ConstMatView a, ConstMatView b) {
  ComplexMatrix c(a.rows, b.cols);
  matmul_acc(c, a, b);
  return c;
}

/// A^H * B without forming the adjoint.
inline ComplexMatrix matmul_adjA(ConstMatView a, ConstMatView b) {
  if (a.rows != b.rows) throw DimensionMismatch("matmul_adjA: shape mismatch");
  ComplexMatrix c(a.cols, b.cols);
  for (index_t j = 0; j < b.cols; ++j) {
    const cxd* bj = b.col(j);
    for (index_t i = 0; i < a.cols; ++i) {
      const cxd* ai = a.col(i);
      cxd s(0.0);
      for (index_t p = 0; p < a.rows; ++p) s += std::conj(ai[p]) * bj[p];
      c(i, j) = s;
    }
  }
  return c;
}

/// y = A * x for a single vector.
inline std::vector<cxd> matvec(ConstMatView a, std::span<const cxd> x) {
  if (a.cols != x.size()) throw DimensionMismatch("matvec: shape mismatch");
  std::vector<cxd> y(a.rows, cxd(0.0));
  for (index_t p = 0; p < a.cols; ++p) {
    const cxd f = x[p];
    if (f == cxd(0.0)) continue;
    const cxd* ap = a.col(p);
    for (index_t i = 0; i < a.rows; ++i) y[i] += f * ap[i];
  }
  return y;
}

// ---------------------------------------------------------------------------
// randomness (all seeded; the library never draws from global state)

/// Standard normal real entries (stored complex). The default seeding for
/// starting blocks V.
inline ComplexMatrix random_real_gaussian(index_t rows, index_t cols,
                                          std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (index_t j = 0; j < cols; ++j)
    for (index_t i = 0; i < rows; ++i) m(i, j) = cxd(dist(rng), 0.0);
  return m;
}

/// Complex standard normal entries (real and imaginary parts independent).
inline ComplexMatrix random_complex_gaussian(index_t rows, index_t cols,
                                             std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (index_t j = 0; j < cols; ++j)
    for (index_t i = 0; i < rows; ++i) {
      const double re = dist(rng);
      const double im = dist(rng);
      m(i, j) = cxd(re, im);
    }
  return m;
}

}  // namespace cieig
