#pragma once

// Threshold coefficients in bulk-normalized units, i.e. for the model
// Y = X + Z/sqrt(n). Multiply by sqrt(n)*sigma for Y = X + sigma*Z.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "svshrink/errors.hpp"
#include "svshrink/mp_law.hpp"

namespace svshrink {

/// Optimal hard threshold for known noise level; 4/sqrt(3) when beta = 1.
inline double lambda_star(AspectRatio beta) noexcept {
  const double b = beta.value();
  return std::sqrt(2.0 * (b + 1.0) + 8.0 * b / ((b + 1.0) + std::sqrt(b * b + 14.0 * b + 1.0)));
}

/// Threshold coefficient applied to the median data singular value when the
/// noise level is unknown: lambda_star / sqrt(mp_median).
inline double omega(AspectRatio beta) { return lambda_star(beta) / std::sqrt(mp_median(beta)); }

/// Cubic fit to omega, accurate to about 0.02 over (0, 1].
inline double omega_approx(AspectRatio beta) noexcept {
  const double b = beta.value();
  return 0.56 * b * b * b - 0.95 * b * b + 1.82 * b + 1.43;
}

/// Asymptotic location of the data singular value produced by a signal
/// singular value x. Signals at or below beta^(1/4) are swallowed by the bulk.
inline double spike_forward(double x, AspectRatio beta) {
  if (!(x >= 0.0)) {
    throw DomainError("signal singular value must be nonnegative");
  }
  if (x <= beta.quarter_root()) {
    return bulk_edge(beta);
  }
  return std::sqrt((x + 1.0 / x) * (x + beta.value() / x));
}

/// Inverse of spike_forward above the bulk: the signal level whose data
/// singular value converges to lambda. Requires lambda > 1 + sqrt(beta).
inline double x_star(double lambda, AspectRatio beta) {
  if (!(lambda > bulk_edge(beta))) {
    throw DomainError("x_star requires lambda strictly above the bulk edge 1 + sqrt(beta)");
  }
  const double b = beta.value();
  const double q = lambda * lambda - b - 1.0;
  return std::sqrt((q + std::sqrt(q * q - 4.0 * b)) / 2.0);
}

struct ThresholdCoefficients {
  AspectRatio beta;
  double lambda_star;
  double omega;
  double mu_beta;  // squared-value units
};

inline ThresholdCoefficients threshold_coefficients(AspectRatio beta) {
  const double mu = mp_median(beta);
  const double ls = lambda_star(beta);
  return {beta, ls, ls / std::sqrt(mu), mu};
}

namespace detail {

// Median with the midpoint convention for even lengths. Takes a copy.
inline double median(std::vector<double> values) {
  const std::size_t k = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(k / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double upper = *mid;
  if (k % 2 == 1) {
    return upper;
  }
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace detail

/// Noise-level estimate y_med / sqrt(n * mu_beta), with n = max(m, n).
/// `singular_values` should hold all min(m,n) singular values of the data.
inline double estimate_sigma(std::span<const double> singular_values, std::size_t m,
                             std::size_t n) {
  if (singular_values.empty()) {
    throw EmptyInput("estimate_sigma needs at least one singular value");
  }
  const AspectRatio beta = AspectRatio::from_shape(m, n);
  const double y_med = detail::median({singular_values.begin(), singular_values.end()});
  const double big = static_cast<double>(std::max(m, n));
  return y_med / std::sqrt(big * mp_median(beta));
}

}  // namespace svshrink
