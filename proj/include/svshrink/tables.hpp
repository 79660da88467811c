#pragma once

// Coefficient and guarantee tables regenerated from the formulas, alongside
// the commonly quoted four-decimal values they are checked against.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "svshrink/amse.hpp"
#include "svshrink/rules.hpp"
#include "svshrink/thresholds.hpp"

namespace svshrink::tables {

struct TabulatedValue {
  double beta;
  double value;
};

/// Quoted lambda_star(beta), four decimals.
inline constexpr std::array<TabulatedValue, 20> kQuotedLambdaStar{{
    {0.05, 1.5066}, {0.10, 1.5816}, {0.15, 1.6466}, {0.20, 1.7048}, {0.25, 1.7580},
    {0.30, 1.8074}, {0.35, 1.8537}, {0.40, 1.8974}, {0.45, 1.9389}, {0.50, 1.9786},
    {0.55, 2.0167}, {0.60, 2.0533}, {0.65, 2.0887}, {0.70, 2.1229}, {0.75, 2.1561},
    {0.80, 2.1883}, {0.85, 2.2197}, {0.90, 2.2503}, {0.95, 2.2802}, {1.00, 2.3094},
}};

/// Quoted omega(beta), four decimals (three for 0.45).
inline constexpr std::array<TabulatedValue, 20> kQuotedOmega{{
    {0.05, 1.5194}, {0.10, 1.6089}, {0.15, 1.6896}, {0.20, 1.7650}, {0.25, 1.8371},
    {0.30, 1.9061}, {0.35, 1.9741}, {0.40, 2.0403}, {0.45, 2.106},  {0.50, 2.1711},
    {0.55, 2.2365}, {0.60, 2.3021}, {0.65, 2.3679}, {0.70, 2.4339}, {0.75, 2.5011},
    {0.80, 2.5697}, {0.85, 2.6399}, {0.90, 2.7099}, {0.95, 2.7832}, {1.00, 2.8582},
}};

struct CoefficientRow {
  double beta;
  double lambda_star;
  double omega;
};

/// beta = 0.05, 0.10, ..., 1.00.
inline std::vector<CoefficientRow> coefficient_table() {
  std::vector<CoefficientRow> rows;
  for (int k = 1; k <= 20; ++k) {
    const AspectRatio beta(0.05 * k);
    const ThresholdCoefficients c = threshold_coefficients(beta);
    rows.push_back({beta.value(), c.lambda_star, c.omega});
  }
  return rows;
}

struct RuleRow {
  std::string name;
  ShrinkageRule rule;
  double value;  // per unit rank (guarantees) or per unit nuclear norm (constants)
};

/// The square-case (beta = 1) rules compared throughout: optimal shrinker,
/// tuned hard threshold, hard threshold at 2.02, TSVD and tuned soft threshold.
inline std::vector<std::pair<std::string, ShrinkageRule>> square_case_rules() {
  const AspectRatio one(1.0);
  return {
      {"optimal shrinker", OptimalShrink{}},
      {"optimally tuned SVHT", Hard{lambda_star(one)}},
      {"SVHT at 2.02", Hard{2.02}},
      {"TSVD", Truncate{1}},
      {"optimally tuned SVST", Soft{bulk_edge(one)}},
  };
}

/// Worst-case AMSE per unit rank, beta = 1.
inline std::vector<RuleRow> guarantee_table() {
  const AspectRatio one(1.0);
  std::vector<RuleRow> rows;
  for (auto& [name, rule] : square_case_rules()) {
    rows.push_back({name, rule, worst_case_amse(rule, 1, one).value});
  }
  return rows;
}

/// Best constant C in worst-case AMSE <= C * (nuclear norm), beta = 1.
inline std::vector<RuleRow> nuclear_constant_table() {
  const AspectRatio one(1.0);
  std::vector<RuleRow> rows;
  for (auto& [name, rule] : square_case_rules()) {
    rows.push_back({name, rule, nuclear_ball_constant(rule, one)});
  }
  return rows;
}

}  // namespace svshrink::tables
