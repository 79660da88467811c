#pragma once

// Singular-value shrinkage of data matrices Y = X + sigma * Z.
//
// Inputs with more rows than columns are transposed internally so that the
// working shape has m <= n, then transposed back; beta is min/max either way.
// Thresholds in the rules are bulk-normalized: a rule sees y / (sqrt(n) sigma).

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "svshrink/amse.hpp"
#include "svshrink/errors.hpp"
#include "svshrink/mp_law.hpp"
#include "svshrink/rules.hpp"
#include "svshrink/thresholds.hpp"

namespace svshrink {

using Matrix = Eigen::MatrixXd;

struct DenoiseReport {
  Matrix denoised;
  double threshold_used = 0.0;  // absolute units
  double sigma_used = 0.0;
  std::size_t retained_rank = 0;
  std::vector<double> singular_values_in;   // nonincreasing
  std::vector<double> singular_values_out;  // aligned with singular_values_in
  ShrinkageRule rule = OptimalShrink{};
  bool transposed = false;  // input had m > n
};

/// Thin SVD of a data matrix in m <= n orientation.
class Decomposition {
 public:
  explicit Decomposition(const Matrix& y) {
    if (y.rows() == 0 || y.cols() == 0) {
      throw EmptyInput("data matrix must have at least one row and one column");
    }
    if (!y.allFinite()) {
      throw NonFiniteInput("data matrix contains NaN or infinite entries");
    }
    transposed_ = y.rows() > y.cols();
    const Matrix work = transposed_ ? Matrix(y.transpose()) : y;
    m_ = static_cast<std::size_t>(work.rows());
    n_ = static_cast<std::size_t>(work.cols());
    Eigen::BDCSVD<Matrix> svd(work, Eigen::ComputeThinU | Eigen::ComputeThinV);
    u_ = svd.matrixU();
    v_ = svd.matrixV();
    const Eigen::VectorXd& s = svd.singularValues();
    values_.assign(s.data(), s.data() + s.size());
  }

  std::size_t rows() const noexcept { return m_; }  // working orientation, m <= n
  std::size_t cols() const noexcept { return n_; }
  bool transposed() const noexcept { return transposed_; }
  AspectRatio beta() const { return AspectRatio::from_shape(m_, n_); }
  const std::vector<double>& singular_values() const noexcept { return values_; }
  const Matrix& left() const noexcept { return u_; }
  const Matrix& right() const noexcept { return v_; }

  /// U diag(values) V^T in the caller's original orientation.
  Matrix reconstruct(const std::vector<double>& values) const {
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] != 0.0) {
        const auto k = static_cast<Eigen::Index>(i);
        out.noalias() += values[i] * u_.col(k) * v_.col(k).transpose();
      }
    }
    if (transposed_) {
      out.transposeInPlace();
    }
    return out;
  }

 private:
  Matrix u_;
  Matrix v_;
  std::vector<double> values_;
  std::size_t m_ = 0;
  std::size_t n_ = 0;
  bool transposed_ = false;
};

namespace detail {

inline void require_positive_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("noise level sigma must be positive and finite");
  }
}

inline std::size_t count_nonzero(const std::vector<double>& v) {
  std::size_t k = 0;
  for (double x : v) {
    k += x != 0.0 ? 1 : 0;
  }
  return k;
}

inline DenoiseReport hard_threshold(const Decomposition& d, double tau, double sigma,
                                    ShrinkageRule rule) {
  DenoiseReport report;
  report.singular_values_in = d.singular_values();
  report.singular_values_out.reserve(report.singular_values_in.size());
  for (double y : report.singular_values_in) {
    report.singular_values_out.push_back(y >= tau ? y : 0.0);
  }
  report.denoised = d.reconstruct(report.singular_values_out);
  report.threshold_used = tau;
  report.sigma_used = sigma;
  report.retained_rank = count_nonzero(report.singular_values_out);
  report.rule = rule;
  report.transposed = d.transposed();
  return report;
}

}  // namespace detail

/// Apply a bulk-normalized rule at noise level sigma:
/// Xhat = sqrt(n) sigma * rule(Y / (sqrt(n) sigma)).
inline DenoiseReport apply_rule(const Decomposition& d, const ShrinkageRule& rule, double sigma) {
  validate(rule);
  detail::require_positive_sigma(sigma);
  const double scale = std::sqrt(static_cast<double>(d.cols())) * sigma;
  const AspectRatio beta = d.beta();
  if (const auto* h = std::get_if<Hard>(&rule)) {
    return detail::hard_threshold(d, h->lambda * scale, sigma, rule);
  }

  DenoiseReport report;
  report.singular_values_in = d.singular_values();
  const auto& in = report.singular_values_in;
  std::vector<double>& out = report.singular_values_out;
  out.assign(in.size(), 0.0);

  std::visit(overloaded{
                 [](const Hard&) {},
                 [&](const Soft& s) {
                   report.threshold_used = s.s * scale;
                   for (std::size_t i = 0; i < in.size(); ++i) {
                     out[i] = std::max(in[i] - report.threshold_used, 0.0);
                   }
                 },
                 [&](const Truncate& t) {
                   if (t.rank > in.size()) {
                     throw RankTooLarge("truncation rank " + std::to_string(t.rank) +
                                        " exceeds min(m, n) = " + std::to_string(in.size()));
                   }
                   for (std::size_t i = 0; i < t.rank; ++i) {
                     out[i] = in[i];
                   }
                   report.threshold_used = t.rank > 0 ? in[t.rank - 1] : 0.0;
                 },
                 [&](const OptimalShrink&) {
                   report.threshold_used = bulk_edge(beta) * scale;
                   for (std::size_t i = 0; i < in.size(); ++i) {
                     out[i] = scale * optimal_shrinker_eta(in[i] / scale, beta);
                   }
                 },
             },
             rule);

  report.denoised = d.reconstruct(out);
  report.sigma_used = sigma;
  report.retained_rank = detail::count_nonzero(out);
  report.rule = rule;
  report.transposed = d.transposed();
  return report;
}

inline DenoiseReport apply_rule(const Matrix& y, const ShrinkageRule& rule, double sigma) {
  detail::require_positive_sigma(sigma);
  return apply_rule(Decomposition(y), rule, sigma);
}

/// Optimal hard threshold for known sigma: tau = lambda_star(beta) sqrt(n) sigma.
inline DenoiseReport svht_known_sigma(const Matrix& y, double sigma) {
  detail::require_positive_sigma(sigma);
  const Decomposition d(y);
  return apply_rule(d, Hard{lambda_star(d.beta())}, sigma);
}

/// Optimal hard threshold for unknown sigma: tau = omega(beta) * y_med.
inline DenoiseReport svht_unknown_sigma(const Decomposition& d) {
  if (d.rows() < 2) {
    throw TooSmall("unknown-noise thresholding needs min(m, n) >= 2");
  }
  const AspectRatio beta = d.beta();
  const auto& values = d.singular_values();
  const double tau = omega(beta) * detail::median(values);
  const double sigma_hat = estimate_sigma(values, d.rows(), d.cols());
  const double lambda = lambda_star(beta);
  return detail::hard_threshold(d, tau, sigma_hat, Hard{lambda});
}

inline DenoiseReport svht_unknown_sigma(const Matrix& y) {
  if (std::min(y.rows(), y.cols()) < 2) {
    throw TooSmall("unknown-noise thresholding needs min(m, n) >= 2");
  }
  return svht_unknown_sigma(Decomposition(y));
}

/// Squared Frobenius distance.
inline double mse(const Matrix& xhat, const Matrix& x) {
  if (xhat.rows() != x.rows() || xhat.cols() != x.cols()) {
    throw ShapeMismatch("mse: matrices have different shapes");
  }
  return (xhat - x).squaredNorm();
}

}  // namespace svshrink
