#pragma once

// Marcenko-Pastur law for the squared singular values of an m-by-n noise
// matrix Z/sqrt(n) with unit-variance entries, m <= n.
//
// Units: mp_density, mp_cdf, mp_median and MpSupport work on SQUARED
// singular values. bulk_edge is in (unsquared) singular-value units.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "svshrink/errors.hpp"

namespace svshrink {

/// Shape parameter beta = m/n of a matrix with m <= n, in (0, 1].
class AspectRatio {
 public:
  explicit AspectRatio(double beta) : beta_(beta) {
    if (!(beta > 0.0 && beta <= 1.0)) {
      throw DomainError("aspect ratio must lie in (0, 1], got " + std::to_string(beta));
    }
  }

  /// min(m,n)/max(m,n); the orientation of the matrix does not matter.
  static AspectRatio from_shape(std::size_t m, std::size_t n) {
    if (m == 0 || n == 0) {
      throw DomainError("matrix dimensions must be positive");
    }
    return AspectRatio(static_cast<double>(std::min(m, n)) /
                       static_cast<double>(std::max(m, n)));
  }

  double value() const noexcept { return beta_; }
  double sqrt() const noexcept { return std::sqrt(beta_); }
  /// beta^(1/4): the detection threshold for a signal singular value.
  double quarter_root() const noexcept { return std::sqrt(std::sqrt(beta_)); }

  friend bool operator==(AspectRatio a, AspectRatio b) noexcept { return a.beta_ == b.beta_; }

 private:
  double beta_;
};

/// Support [(1-sqrt(beta))^2, (1+sqrt(beta))^2] of the squared-value law.
struct MpSupport {
  double lower;
  double upper;
};

inline MpSupport mp_support(AspectRatio beta) noexcept {
  const double r = beta.sqrt();
  return {(1.0 - r) * (1.0 - r), (1.0 + r) * (1.0 + r)};
}

/// Upper edge 1 + sqrt(beta) of the noise singular values (singular-value units).
inline double bulk_edge(AspectRatio beta) noexcept { return 1.0 + beta.sqrt(); }

/// Density of the squared singular values at t; zero off the open support.
inline double mp_density(double t, AspectRatio beta) noexcept {
  const auto [lo, hi] = mp_support(beta);
  if (!(t > lo && t < hi)) {
    return 0.0;
  }
  return std::sqrt((hi - t) * (t - lo)) / (2.0 * std::numbers::pi * beta.value() * t);
}

namespace detail {

// Density after t = lo + (hi - lo) sin^2(theta), including the Jacobian.
// Both inverse-square-root edge singularities cancel, leaving a smooth
// integrand on [0, pi/2].
inline double mp_angular_density(double theta, double lo, double hi, double beta) noexcept {
  const double width = hi - lo;
  const double s = std::sin(theta);
  const double s2 = s * s;
  const double c2 = 1.0 - s2;
  if (lo == 0.0) {
    return width * c2 / (std::numbers::pi * beta);
  }
  return width * width * s2 * c2 / (std::numbers::pi * beta * (lo + width * s2));
}

inline constexpr double kCdfTolerance = 1e-12;
inline constexpr unsigned kCdfMaxDepth = 20;

}  // namespace detail

/// P(T <= t) for T distributed by the squared-value law.
inline double mp_cdf(double t, AspectRatio beta) {
  const auto [lo, hi] = mp_support(beta);
  if (t <= lo) {
    return 0.0;
  }
  if (t >= hi) {
    return 1.0;
  }
  const double u = std::clamp((t - lo) / (hi - lo), 0.0, 1.0);
  const double theta = std::asin(std::sqrt(u));
  const double b = beta.value();
  auto f = [lo, hi, b](double th) { return detail::mp_angular_density(th, lo, hi, b); };
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, 0.0, theta, detail::kCdfMaxDepth, detail::kCdfTolerance, &err);
  return std::clamp(value, 0.0, 1.0);
}

/// Median of the squared-value law, found by bisection on mp_cdf.
inline double mp_median(AspectRatio beta) {
  auto [lo, hi] = mp_support(beta);
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mp_cdf(mid, beta) < 0.5) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace svshrink
