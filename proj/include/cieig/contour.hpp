// Copyright (c) 2026 The cieig developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "cieig/matrix.hpp"

namespace cieig {

/// Circular or elliptic integration region in the complex plane.
struct ContourRegion {
  enum class Kind { circle, ellipse };
  Kind kind = Kind::circle;
  cxd center{0.0, 0.0};
  double semi_major = 1.0;  // a
  double semi_minor = 1.0;  // b (= a for circles)

  static ContourRegion circle(cxd center, double radius) {
    if (!(radius > 0.0)) throw InvalidArgument("circle radius must be positive");
    return {Kind::circle, center, radius, radius};
  }
  static ContourRegion ellipse(cxd center, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
      throw InvalidArgument("ellipse semi-axes must be positive");
    return {Kind::ellipse, center, a, b};
  }

  /// Strict membership: ((Re z-Re c)/a)^2 + ((Im z-Im c)/b)^2 < 1.
  bool contains(cxd z) const { return boundary_residual(z) < 0.0; }

  /// Membership with the semi-axes grown (margin > 0) or shrunk (< 0).
  bool contains_with_margin(cxd z, double margin) const {
    const double ax = semi_major * (1.0 + margin);
    const double bx = semi_minor * (1.0 + margin);
    const double xr = (z.real() - center.real()) / ax;
    const double xi = (z.imag() - center.imag()) / bx;
    return xr * xr + xi * xi < 1.0;
  }

  /// ((Re z-Re c)/a)^2 + ((Im z-Im c)/b)^2 - 1; zero on the boundary.
  double boundary_residual(cxd z) const {
    const double xr = (z.real() - center.real()) / semi_major;
    const double xi = (z.imag() - center.imag()) / semi_minor;
    return xr * xr + xi * xi - 1.0;
  }

  cxd boundary_point(double theta) const {
    return center + cxd(semi_major * std::cos(theta), semi_minor * std::sin(theta));
  }

  /// Derivative of the boundary parameterization.
  cxd boundary_tangent(double theta) const {
    return cxd(-semi_major * std::sin(theta), semi_minor * std::cos(theta));
  }

  /// Symmetric about the real axis (conjugation maps the contour to itself).
  bool real_symmetric() const { return center.imag() == 0.0; }
};

enum class RuleKind { trapezoidal, gauss_legendre };

/// Contour quadrature rule. Weights absorb the 1/(2 pi i) prefactor, so
/// sum_j w_j g(z_j) approximates the Cauchy-normalized contour integral
/// and the filtered moments are plain weighted sums.
struct QuadratureRule {
  ContourRegion region;
  RuleKind kind = RuleKind::trapezoidal;
  std::vector<cxd> points;
  std::vector<cxd> weights;

  index_t size() const { return points.size(); }
};

namespace detail {

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
inline void gauss_legendre_nodes(index_t m, std::vector<double>& x,
                                 std::vector<double>& w) {
  x.assign(m, 0.0);
  w.assign(m, 0.0);
  for (index_t i = 0; i < (m + 1) / 2; ++i) {
    double t = std::cos(std::numbers::pi * (double(i) + 0.75) / (double(m) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (index_t k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * double(k) - 1.0) * t * p1 - (double(k) - 1.0) * p0) / double(k);
        p0 = p1;
        p1 = p2;
      }
      dp = double(m) * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[m - 1 - i] = t;
    w[i] = w[m - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  if (m % 2 == 1) x[m / 2] = 0.0;
}

}  // namespace detail

/// Build an N-point quadrature rule on the region boundary.
///
/// Trapezoidal nodes sit at theta_j = 2 pi j / N, so circle nodes satisfy
/// (z_j - center)^N = r^N exactly and the induced rational filter has the
/// closed form 1 / (1 - ((lambda-center)/r)^N). Gauss-Legendre is provided
/// for circles only, one mapped panel per quadrant.
inline QuadratureRule build_rule(const ContourRegion& region, RuleKind kind,
                                 index_t n) {
  if (n < 2) throw InvalidArgument("build_rule: N must be >= 2");
  QuadratureRule rule;
  rule.region = region;
  rule.kind = kind;
  rule.points.resize(n);
  rule.weights.resize(n);
  const cxd inv_i_n = cxd(0.0, -1.0) / double(n);  // 1/(i N)
  switch (kind) {
    case RuleKind::trapezoidal: {
      for (index_t j = 0; j < n; ++j) {
        const double theta = 2.0 * std::numbers::pi * double(j) / double(n);
        rule.points[j] = region.boundary_point(theta);
        rule.weights[j] = region.boundary_tangent(theta) * inv_i_n;
      }
      break;
    }
    case RuleKind::gauss_legendre: {
      if (region.kind != ContourRegion::Kind::circle)
        throw UnsupportedRule("gauss_legendre quadrature supports circles only");
      if (n % 4 != 0)
        throw UnsupportedRule("gauss_legendre on a circle needs N divisible by 4");
      const index_t per_arc = n / 4;
      std::vector<double> gx, gw;
      detail::gauss_legendre_nodes(per_arc, gx, gw);
      index_t out = 0;
      for (int arc = 0; arc < 4; ++arc) {
        const double a0 = 0.5 * std::numbers::pi * double(arc);
        const double half = 0.25 * std::numbers::pi;
        const double mid = a0 + half;
        for (index_t i = 0; i < per_arc; ++i, ++out) {
          const double theta = mid + half * gx[i];
          rule.points[out] = region.boundary_point(theta);
          rule.weights[out] = region.boundary_tangent(theta) *
                              cxd(0.0, -1.0) * (half * gw[i]) /
                              (2.0 * std::numbers::pi);
        }
      }
      break;
    }
  }
  return rule;
}

// ---------------------------------------------------------------------------
// weight condition

struct WeightConditionReport {
  index_t max_violation_k = 0;  // worst k >= 0, by scaled magnitude
  double max_abs = 0.0;         // that worst scaled magnitude
  cxd k_minus1_value{0.0, 0.0}; // sum_j w_j / z_j
  bool passes = false;
};

namespace detail {

struct KahanComplex {
  cxd sum{0.0, 0.0};
  cxd comp{0.0, 0.0};
  void add(cxd v) {
    const cxd y = v - comp;
    const cxd t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

}  // namespace detail

/// Evaluate sum_j w_j z_j^k for k = -1, 0, ..., N-2 in compensated
/// summation. Passes iff every k >= 0 sum is below tol relative to the
/// largest term magnitude and the k = -1 sum is above tol.
inline WeightConditionReport check_weight_condition(const QuadratureRule& rule,
                                                    double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("check_weight_condition: tol must be > 0");
  const index_t n = rule.size();
  WeightConditionReport rep;

  // k = -1
  {
    detail::KahanComplex acc;
    for (index_t j = 0; j < n; ++j) acc.add(rule.weights[j] / rule.points[j]);
    rep.k_minus1_value = acc.sum;
  }

  std::vector<cxd> zpow(n, cxd(1.0));
  bool ok = std::abs(rep.k_minus1_value) > tol;
  double worst = -1.0;
  for (index_t k = 0; n >= 2 && k + 2 <= n; ++k) {
    detail::KahanComplex acc;
    double term_max = 0.0;
    for (index_t j = 0; j < n; ++j) {
      const cxd term = rule.weights[j] * zpow[j];
      term_max = std::max(term_max, std::abs(term));
      acc.add(term);
      zpow[j] *= rule.points[j];
    }
    const double scale = term_max > 0.0 ? term_max : 1.0;
    const double scaled = std::abs(acc.sum) / scale;
    if (scaled > worst) {
      worst = scaled;
      rep.max_violation_k = k;
      rep.max_abs = scaled;
    }
    if (std::abs(acc.sum) > tol * scale) ok = false;
  }
  rep.passes = ok;
  return rep;
}

// ---------------------------------------------------------------------------
// rational filter

inline constexpr double kPoleCollisionTol = 1e-14;

/// f(lambda) = sum_j w_j / (z_j - lambda); approximately 1 inside the
/// region and decays sharply outside.
inline cxd filter_eval(const QuadratureRule& rule, cxd lambda) {
  detail::KahanComplex acc;
  for (index_t j = 0; j < rule.size(); ++j) {
    const cxd d = rule.points[j] - lambda;
    if (std::abs(d) <= kPoleCollisionTol)
      throw PoleCollision("filter_eval: lambda coincides with a quadrature point", j);
    acc.add(rule.weights[j] / d);
  }
  return acc.sum;
}

struct FilterProfile {
  std::vector<cxd> sample_points;
  std::vector<double> magnitudes;
};

inline FilterProfile filter_profile(const QuadratureRule& rule,
                                    const std::vector<cxd>& samples) {
  FilterProfile prof;
  prof.sample_points = samples;
  prof.magnitudes.reserve(samples.size());
  for (index_t s = 0; s < samples.size(); ++s) {
    try {
      prof.magnitudes.push_back(std::abs(filter_eval(rule, samples[s])));
    } catch (const PoleCollision& e) {
      throw PoleCollision("filter_profile: sample " + std::to_string(s) +
                              " hits a quadrature point",
                          e.point_index());
    }
  }
  return prof;
}

/// Row vector [sum_j w_j z_j^k / (z_j - lambda)^p] for p = 1..block_size;
/// the Jordan-block generalization of the scalar filter.
inline std::vector<cxd> fk_vector(const QuadratureRule& rule, cxd lambda,
                                  index_t block_size, index_t k) {
  if (block_size < 1) throw InvalidArgument("fk_vector: block_size must be >= 1");
  std::vector<detail::KahanComplex> acc(block_size);
  for (index_t j = 0; j < rule.size(); ++j) {
    const cxd d = rule.points[j] - lambda;
    if (std::abs(d) <= kPoleCollisionTol)
      throw PoleCollision("fk_vector: lambda coincides with a quadrature point", j);
    cxd zk(1.0);
    for (index_t q = 0; q < k; ++q) zk *= rule.points[j];
    cxd dp = d;
    for (index_t p = 0; p < block_size; ++p) {
      acc[p].add(rule.weights[j] * zk / dp);
      dp *= d;
    }
  }
  std::vector<cxd> out(block_size);
  for (index_t p = 0; p < block_size; ++p) out[p] = acc[p].sum;
  return out;
}

}  // namespace cieig
