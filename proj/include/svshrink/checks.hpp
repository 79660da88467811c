#pragma once

// Self-check of the analytic layer: coefficient tables, closed-form
// identities, minimax values and dominance grids. No randomness.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "svshrink/amse.hpp"
#include "svshrink/mp_law.hpp"
#include "svshrink/tables.hpp"
#include "svshrink/thresholds.hpp"

namespace svshrink::checks {

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

struct CheckOptions {
  // Added to every lambda_star the checks use; nonzero only to prove the
  // checks can fail.
  double lambda_star_offset = 0.0;
};

namespace detail {

inline std::string fmt(double v) { return svshrink::detail::format_g(v, 6); }

inline CheckResult max_error_check(std::string name, double max_error, double tol) {
  return {std::move(name), max_error <= tol, "max error " + fmt(max_error) + " (tol " + fmt(tol) + ")"};
}

// Dominance of Hard(lambda_star) over every Hard(lambda) and over TSVD on
// lambda in {edge + 0.01, ..., 4}, x in {0.01, ..., 6}.
inline double dominance_violation(double offset, bool against_tsvd) {
  double worst = 0.0;
  for (double b : {0.1, 0.5, 1.0}) {
    const AspectRatio beta(b);
    const Hard best{lambda_star(beta) + offset};
    const double edge = bulk_edge(beta);
    for (int xi = 1; xi <= 600; ++xi) {
      const double x = 0.01 * xi;
      const double mine = amse_per_value(best, x, beta);
      if (against_tsvd) {
        worst = std::max(worst, mine - amse_tsvd_per_value(x, beta));
        continue;
      }
      for (int k = 1;; ++k) {
        const double lambda = edge + 0.01 * k;
        if (lambda > 4.0 + 1e-12) {
          break;
        }
        worst = std::max(worst, mine - amse_per_value(Hard{lambda}, x, beta));
      }
    }
  }
  return worst;
}

}  // namespace detail

inline std::vector<CheckResult> run_analytic_checks(const CheckOptions& options = {}) {
  const double off = options.lambda_star_offset;
  auto ls = [off](AspectRatio beta) { return lambda_star(beta) + off; };
  const AspectRatio one(1.0);
  std::vector<CheckResult> out;

  {
    double err = 0.0;
    for (const auto& row : tables::kQuotedLambdaStar) {
      err = std::max(err, std::abs(ls(AspectRatio(row.beta)) - row.value));
    }
    out.push_back(detail::max_error_check("lambda_star_table", err, 5e-5));
  }
  {
    double err = 0.0;
    for (const auto& row : tables::kQuotedOmega) {
      const AspectRatio beta(row.beta);
      err = std::max(err, std::abs(ls(beta) / std::sqrt(mp_median(beta)) - row.value));
    }
    out.push_back(detail::max_error_check("omega_table_consistency", err, 1e-3));
  }
  {
    double err = 0.0;
    for (int k = 1; k <= 1000; ++k) {
      const AspectRatio beta(0.001 * k);
      err = std::max(err, std::abs(omega_approx(beta) - ls(beta) / std::sqrt(mp_median(beta))));
    }
    out.push_back(detail::max_error_check("omega_cubic_approximation", err, 0.02));
  }
  {
    double err = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const AspectRatio beta(0.05 * k);
      const double hi = mp_support(beta).upper;
      err = std::max(err, std::abs(mp_cdf(hi * (1.0 - 1e-14), beta) - 1.0));
      err = std::max(err, std::abs(mp_cdf(mp_median(beta), beta) - 0.5));
    }
    out.push_back(detail::max_error_check("mp_normalization_and_median", err, 1e-8));
  }
  {
    bool ok = true;
    double prev = 0.0;
    for (int k = 1; k <= 1000; ++k) {
      const AspectRatio beta(0.001 * k);
      const double v = ls(beta);
      ok = ok && v > bulk_edge(beta) && v > prev;
      prev = v;
    }
    out.push_back({"lambda_star_above_bulk_and_increasing", ok, ok ? "ok" : "violated"});
  }
  {
    double err = 0.0;
    for (double b : {0.1, 0.3, 0.7, 1.0}) {
      const AspectRatio beta(b);
      for (double x = beta.quarter_root() + 0.01; x < 6.0; x += 0.05) {
        err = std::max(err, std::abs(x_star(spike_forward(x, beta), beta) - x));
      }
    }
    out.push_back(detail::max_error_check("spike_map_round_trip", err, 1e-9));
  }
  {
    const double err = std::abs(ls(one) - 4.0 / std::sqrt(3.0));
    out.push_back(detail::max_error_check("square_threshold_is_4_over_sqrt3", err, 1e-12));
  }
  {
    double err = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const AspectRatio beta(0.01 * k);
      const double xs = x_star(ls(beta), beta);
      err = std::max(err, std::abs(svshrink::detail::retained_spike_amse(xs, beta) - xs * xs));
    }
    out.push_back(detail::max_error_check("zero_jump_at_lambda_star", err, 1e-8));
  }
  {
    const double expected[] = {2.0, 3.0, 4.26, 5.0, 6.0};
    const double tol[] = {1e-6, 1e-6, 0.005, 1e-6, 1e-6};
    const auto rules = tables::square_case_rules();
    bool ok = true;
    std::string values;
    for (std::size_t i = 0; i < rules.size(); ++i) {
      ShrinkageRule rule = rules[i].second;
      if (i == 1) {
        rule = Hard{ls(one)};
      }
      const double v = worst_case_amse(rule, 1, one).value;
      ok = ok && std::abs(v - expected[i]) <= tol[i];
      values += (i ? ", " : "") + detail::fmt(v);
    }
    out.push_back({"worst_case_guarantees", ok, values});
  }
  {
    const double sqrt3 = std::sqrt(3.0);
    const double c_star = nuclear_ball_constant(Hard{ls(one)}, one);
    const double c_202 = nuclear_ball_constant(Hard{2.02}, one);
    const double c_soft = nuclear_ball_constant(Soft{2.0}, one);
    const bool ok = std::abs(c_star - sqrt3) <= 1e-6 && std::abs(c_202 - 3.70) <= 0.01 &&
                    std::abs(c_soft - 1.38) <= 0.01;
    out.push_back({"nuclear_ball_constants_hard_soft", ok,
                   detail::fmt(c_star) + ", " + detail::fmt(c_202) + ", " + detail::fmt(c_soft)});
  }
  {
    double err = 0.0;
    for (int k = 0; k < 200; ++k) {
      const double x = 1.0 + 0.025 * k;
      err = std::max(err, std::abs(amse_per_value(OptimalShrink{}, x, one) - (2.0 - 1.0 / (x * x))));
    }
    out.push_back(detail::max_error_check("optimal_shrinker_closed_form", err, 1e-10));
  }
  {
    const double err =
        std::abs(amse_per_value(Soft{2.0}, std::sqrt(3.0), one) - (7.0 - 8.0 / std::sqrt(3.0)));
    out.push_back(detail::max_error_check("soft_threshold_at_sqrt3", err, 1e-10));
  }
  {
    const double hard = detail::dominance_violation(off, false);
    out.push_back(detail::max_error_check("dominates_every_hard_threshold", hard, 1e-12));
    const double tsvd = detail::dominance_violation(off, true);
    out.push_back(detail::max_error_check("dominates_tsvd", tsvd, 1e-12));
  }
  {
    double err = 0.0;
    for (double b : {0.1, 0.5, 1.0}) {
      const AspectRatio beta(b);
      const MinimaxHard mm = minimax_hard(beta, 1);
      err = std::max(err, std::abs(mm.lambda + off - minimax_hard_numeric(beta).lambda));
    }
    out.push_back(detail::max_error_check("minimax_threshold_numeric", err, 1e-5));
  }
  return out;
}

}  // namespace svshrink::checks
