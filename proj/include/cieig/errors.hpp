// Copyright (c) 2026 The cieig developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace cieig {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public Error {
public:
  explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

class InvalidArgument : public Error {
public:
  explicit InvalidArgument(const std::string& what) : Error(what) {}
};

/// A pivot fell below the singularity threshold during LU elimination.
class SingularMatrix : public Error {
public:
  SingularMatrix(const std::string& what, std::size_t column)
      : Error(what + " (column " + std::to_string(column) + ")"),
        column_(column) {}
  std::size_t column() const { return column_; }

private:
  std::size_t column_;
};

/// A diagonal of R collapsed during QR; signals e.g. Arnoldi breakdown.
class RankDeficient : public Error {
public:
  RankDeficient(const std::string& what, std::size_t column)
      : Error(what + " (column " + std::to_string(column) + ")"),
        column_(column) {}
  std::size_t column() const { return column_; }

private:
  std::size_t column_;
};

/// An iterative kernel exhausted its iteration budget.
class NoConvergence : public Error {
public:
  NoConvergence(const std::string& what, std::size_t index, double residual)
      : Error(what + " (index " + std::to_string(index) + ", residual " +
              std::to_string(residual) + ")"),
        index_(index), residual_(residual) {}
  std::size_t index() const { return index_; }
  double residual() const { return residual_; }

private:
  std::size_t index_;
  double residual_;
};

/// Requested quadrature rule is not available for the given region.
class UnsupportedRule : public Error {
public:
  explicit UnsupportedRule(const std::string& what) : Error(what) {}
};

/// An evaluation point coincides with a quadrature point.
class PoleCollision : public Error {
public:
  PoleCollision(const std::string& what, std::size_t point_index)
      : Error(what + " (quadrature point " + std::to_string(point_index) + ")"),
        point_index_(point_index) {}
  std::size_t point_index() const { return point_index_; }

private:
  std::size_t point_index_;
};

/// A shifted system z_j B - A was numerically singular, i.e. a quadrature
/// point hit the spectrum of the pencil.
class QuadraturePointHitsSpectrum : public Error {
public:
  QuadraturePointHitsSpectrum(std::size_t j, std::complex<double> z)
      : Error("quadrature point " + std::to_string(j) + " at z = (" +
              std::to_string(z.real()) + ", " + std::to_string(z.imag()) +
              ") hits the spectrum"),
        j_(j), z_(z) {}
  std::size_t point_index() const { return j_; }
  std::complex<double> point() const { return z_; }

private:
  std::size_t j_;
  std::complex<double> z_;
};

/// A moment stack does not extend far enough for the requested operation.
class InsufficientDegree : public Error {
public:
  explicit InsufficientDegree(const std::string& what) : Error(what) {}
};

/// The projected B block of a reduced generalized problem is numerically
/// singular; the caller should tighten the rank cutoff.
class SingularReducedB : public Error {
public:
  explicit SingularReducedB(const std::string& what) : Error(what) {}
};

/// Low-rank truncation kept no directions at all.
class RankCollapse : public Error {
public:
  explicit RankCollapse(const std::string& what) : Error(what) {}
};

/// QR of an Arnoldi block remainder was rank deficient; the method has no
/// deflation, so this is fatal for the run.
class ArnoldiBreakdown : public Error {
public:
  explicit ArnoldiBreakdown(const std::string& what) : Error(what) {}
};

/// FEAST requires a Hermitian A and Hermitian positive definite B.
class NotHermitianDefinite : public Error {
public:
  explicit NotHermitianDefinite(const std::string& what) : Error(what) {}
};

/// Invalid generator specification.
class BadSpec : public Error {
public:
  explicit BadSpec(const std::string& what) : Error(what) {}
};

/// The dense oracle needs ground truth when B is singular.
class SingularBWithoutTruth : public Error {
public:
  explicit SingularBWithoutTruth(const std::string& what) : Error(what) {}
};

/// Configuration file / CLI parse failure.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace cieig
