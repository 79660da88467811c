#pragma once

// Asymptotic mean squared error (AMSE) of singular-value shrinkage in the
// model Y = X + Z/sqrt(n), as n -> infinity with m/n -> beta and the signal
// singular values x held fixed. AMSE is additive over signal components, so
// most of this header works with the per-component loss x -> M(rule, x).

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "svshrink/detail/maximize.hpp"
#include "svshrink/errors.hpp"
#include "svshrink/mp_law.hpp"
#include "svshrink/rules.hpp"
#include "svshrink/thresholds.hpp"

namespace svshrink {

/// Upper end of the interior search for worst-case AMSE; tail behaviour past
/// this point is handled by analytic limits.
inline constexpr double kAmseSearchMax = 50.0;

/// Limiting data singular value and singular-vector alignment of one spike.
struct SpikeGeometry {
  double x;
  double y;
  double cos2_left;   // |<a, u>|^2
  double cos2_right;  // |<b, v>|^2
};

inline SpikeGeometry spike_geometry(double x, AspectRatio beta) {
  const double y = spike_forward(x, beta);
  if (x <= beta.quarter_root()) {
    return {x, y, 0.0, 0.0};
  }
  const double b = beta.value();
  const double x2 = x * x;
  const double x4 = x2 * x2;
  return {x, y, (x4 - b) / (x4 + b * x2), (x4 - b) / (x4 + x2)};
}

/// Pointwise-optimal shrinker in bulk-normalized units. Inverts the spike map
/// and shrinks to x * cos_left * cos_right; sqrt((y^2 - 4)_+) when beta = 1.
inline double optimal_shrinker_eta(double y, AspectRatio beta) {
  if (!(y >= 0.0)) {
    throw DomainError("singular value must be nonnegative");
  }
  if (y <= bulk_edge(beta)) {
    return 0.0;
  }
  const SpikeGeometry g = spike_geometry(x_star(y, beta), beta);
  return g.x * std::sqrt(g.cos2_left * g.cos2_right);
}

/// Bulk-normalized shrinkage of a single data singular value. Truncate is
/// rank-based and returns y unchanged; callers decide which values survive.
inline double shrink_value(const ShrinkageRule& rule, double y, AspectRatio beta) {
  return std::visit(overloaded{
                        [y](const Hard& h) { return y >= h.lambda ? y : 0.0; },
                        [y](const Soft& s) { return std::max(y - s.s, 0.0); },
                        [y](const Truncate&) { return y; },
                        [y, beta](const OptimalShrink&) { return optimal_shrinker_eta(y, beta); },
                    },
                    rule);
}

namespace detail {

// AMSE of a component whose data singular value is retained unchanged:
// (x + 1/x)(x + beta/x) - (x^2 - 2 beta/x^2).
inline double retained_spike_amse(double x, AspectRatio beta) noexcept {
  const double b = beta.value();
  const double x2 = x * x;
  return (x + 1.0 / x) * (x + b / x) - (x2 - 2.0 * b / x2);
}

// General per-component AMSE x^2 + eta^2 - 2 x eta cos_l cos_r, eta applied
// to the limiting data singular value.
template <class Eta>
double shrinkage_amse(double x, AspectRatio beta, Eta&& eta_of_y) {
  const SpikeGeometry g = spike_geometry(x, beta);
  const double eta = eta_of_y(g.y);
  return x * x + eta * eta - 2.0 * x * eta * std::sqrt(g.cos2_left * g.cos2_right);
}

inline void require_above_bulk(double threshold, AspectRatio beta, const char* what) {
  if (!(threshold > bulk_edge(beta))) {
    throw BulkThresholdError(std::string(what) +
                             " at or below the bulk edge 1 + sqrt(beta) has no finite AMSE");
  }
}

inline void require_nonnegative(double x) {
  if (!(x >= 0.0)) {
    throw DomainError("signal singular value must be nonnegative");
  }
}

}  // namespace detail

/// Per-component TSVD loss when the true rank is known.
inline double amse_tsvd_per_value(double x, AspectRatio beta) {
  detail::require_nonnegative(x);
  if (x <= beta.quarter_root()) {
    const double edge = bulk_edge(beta);
    return edge * edge + x * x;
  }
  return detail::retained_spike_amse(x, beta);
}

/// Per-component AMSE M(rule, x).
///
/// Hard(lambda) requires lambda > 1 + sqrt(beta) and follows the two-branch
/// form: x^2 below x_star(lambda), the retained-spike loss at and above it.
/// Soft(s) requires s >= 1 + sqrt(beta); below the edge bulk noise leaks into
/// the estimate and the loss diverges. Truncate uses the known-rank TSVD loss.
inline double amse_per_value(const ShrinkageRule& rule, double x, AspectRatio beta) {
  validate(rule);
  detail::require_nonnegative(x);
  return std::visit(
      overloaded{
          [&](const Hard& h) {
            detail::require_above_bulk(h.lambda, beta, "hard threshold");
            return x < x_star(h.lambda, beta) ? x * x : detail::retained_spike_amse(x, beta);
          },
          [&](const Soft& s) {
            if (s.s < bulk_edge(beta)) {
              throw BulkThresholdError(
                  "soft threshold below the bulk edge 1 + sqrt(beta) has no finite AMSE");
            }
            return detail::shrinkage_amse(x, beta,
                                          [&](double y) { return std::max(y - s.s, 0.0); });
          },
          [&](const Truncate&) { return amse_tsvd_per_value(x, beta); },
          [&](const OptimalShrink&) {
            return detail::shrinkage_amse(
                x, beta, [&](double y) { return optimal_shrinker_eta(y, beta); });
          },
      },
      rule);
}

inline double amse_tsvd(const Spectrum& spectrum, AspectRatio beta) {
  double total = 0.0;
  for (double x : spectrum) {
    total += amse_tsvd_per_value(x, beta);
  }
  return total;
}

/// Total AMSE over a spectrum. Truncate(k) is only meaningful when k equals
/// the spectrum rank.
inline double amse(const ShrinkageRule& rule, const Spectrum& spectrum, AspectRatio beta) {
  if (const auto* t = std::get_if<Truncate>(&rule)) {
    if (t->rank != spectrum.rank()) {
      throw DomainError("TSVD AMSE requires the truncation rank to equal the signal rank");
    }
    return amse_tsvd(spectrum, beta);
  }
  double total = 0.0;
  for (double x : spectrum) {
    total += amse_per_value(rule, x, beta);
  }
  return total;
}

struct AmsePoint {
  double x;
  double amse;
};
using AmseCurve = std::vector<AmsePoint>;

inline AmseCurve amse_curve(const ShrinkageRule& rule, AspectRatio beta,
                            std::span<const double> x_grid) {
  AmseCurve curve;
  curve.reserve(x_grid.size());
  for (double x : x_grid) {
    curve.push_back({x, amse_per_value(rule, x, beta)});
  }
  return curve;
}

namespace detail {

// x -> M(rule, x) split at its kinks and jumps, each piece continuous on
// its closed interval (with the piece's own formula at the endpoints).
struct AmsePiece {
  double lo;
  double hi;
  std::function<double(double)> f;
};

inline std::vector<AmsePiece> amse_pieces(const ShrinkageRule& rule, AspectRatio beta,
                                          double x_max) {
  validate(rule);
  const double q = beta.quarter_root();
  auto square = [](double x) { return x * x; };
  auto spike = [beta](double x) { return retained_spike_amse(x, beta); };
  auto split = [x_max](double at, std::function<double(double)> left,
                       std::function<double(double)> right) {
    std::vector<AmsePiece> pieces{{0.0, std::min(at, x_max), std::move(left)}};
    if (at < x_max) {
      pieces.push_back({at, x_max, std::move(right)});
    }
    return pieces;
  };
  return std::visit(
      overloaded{
          [&](const Hard& h) {
            require_above_bulk(h.lambda, beta, "hard threshold");
            return split(x_star(h.lambda, beta), square, spike);
          },
          [&](const Soft& s) {
            if (s.s < bulk_edge(beta)) {
              throw BulkThresholdError(
                  "soft threshold below the bulk edge 1 + sqrt(beta) has no finite AMSE");
            }
            const double kill = s.s > bulk_edge(beta) ? x_star(s.s, beta) : q;
            const double thr = s.s;
            return split(kill, square, [beta, thr](double x) {
              return shrinkage_amse(x, beta, [thr](double y) { return std::max(y - thr, 0.0); });
            });
          },
          [&](const Truncate&) {
            const double edge = bulk_edge(beta);
            return split(q, [edge](double x) { return edge * edge + x * x; }, spike);
          },
          [&](const OptimalShrink&) {
            return split(q, square, [beta](double x) {
              return shrinkage_amse(x, beta,
                                    [beta](double y) { return optimal_shrinker_eta(y, beta); });
            });
          },
      },
      rule);
}

// lim_{x -> infinity} M(rule, x).
inline double amse_high_snr_limit(const ShrinkageRule& rule, AspectRatio beta) {
  const double b = beta.value();
  if (const auto* s = std::get_if<Soft>(&rule)) {
    return s->s * s->s + 1.0 + b;
  }
  return 1.0 + b;
}

// Supremum of g(x, M(rule, x)) over (0, x_max], piece by piece.
template <class G>
Maximum sup_over_pieces(const ShrinkageRule& rule, AspectRatio beta, double x_max, double x_min,
                        G&& g) {
  Maximum best{0.0, -std::numeric_limits<double>::infinity()};
  for (const AmsePiece& piece : amse_pieces(rule, beta, x_max)) {
    const double lo = std::max(piece.lo, x_min);
    if (piece.hi < lo) {
      continue;
    }
    const Maximum m =
        maximize_on_interval([&](double x) { return g(x, piece.f(x)); }, lo, piece.hi);
    if (m.value > best.value) {
      best = m;
    }
  }
  return best;
}

}  // namespace detail

/// Worst case over rank-r spectra; argmax_x is the common least-favorable
/// value of every component, or +infinity when the supremum is only reached
/// in the high-SNR limit.
struct WorstCase {
  double value;
  double argmax_x;
};

/// Numeric supremum of M(rule, .) per component, without closed forms.
inline WorstCase worst_case_amse_numeric(const ShrinkageRule& rule, AspectRatio beta) {
  const detail::Maximum interior = detail::sup_over_pieces(
      rule, beta, kAmseSearchMax, 0.0, [](double, double m) { return m; });
  const double tail = detail::amse_high_snr_limit(rule, beta);
  if (tail >= interior.value) {
    return {tail, std::numeric_limits<double>::infinity()};
  }
  return {interior.value, interior.x};
}

inline WorstCase worst_case_amse(const ShrinkageRule& rule, std::size_t rank, AspectRatio beta) {
  if (rank < 1) {
    throw DomainError("worst-case AMSE needs rank >= 1");
  }
  const double r = static_cast<double>(rank);
  if (const auto* h = std::get_if<Hard>(&rule)) {
    validate(rule);
    detail::require_above_bulk(h->lambda, beta, "hard threshold");
    // Least favorable at x_star(lambda); below lambda_star the supremum is the
    // left limit x_star^2 of the killed branch.
    const double xs = x_star(h->lambda, beta);
    return {r * std::max(xs * xs, detail::retained_spike_amse(xs, beta)), xs};
  }
  const WorstCase one = worst_case_amse_numeric(rule, beta);
  return {r * one.value, one.argmax_x};
}

struct MinimaxHard {
  double lambda;
  double value;
};

/// Nested numeric min over lambda of max over x of the Hard(lambda) loss,
/// for one component.
inline MinimaxHard minimax_hard_numeric(AspectRatio beta) {
  const double edge = bulk_edge(beta);
  auto neg_worst = [&](double lambda) {
    return -worst_case_amse_numeric(Hard{lambda}, beta).value;
  };
  const detail::Maximum m = detail::golden_section_max(neg_worst, edge + 1e-6, edge + 2.0, 1e-10);
  return {m.x, -m.value};
}

/// Minimax hard threshold over rank-r signals and its guaranteed AMSE
/// r/2 * ((beta + 1) + sqrt(beta^2 + 14 beta + 1)).
inline MinimaxHard minimax_hard(AspectRatio beta, std::size_t rank) {
  const double b = beta.value();
  const double per_rank = 0.5 * ((b + 1.0) + std::sqrt(b * b + 14.0 * b + 1.0));
  const MinimaxHard numeric = minimax_hard_numeric(beta);
  if (std::abs(numeric.value - per_rank) > 1e-6) {
    throw std::logic_error("minimax_hard: closed form and numeric min-max disagree");
  }
  return {lambda_star(beta), static_cast<double>(rank) * per_rank};
}

/// Best constant C with worst-case AMSE <= C * xi over the nuclear-norm ball
/// ||x||_1 <= xi, i.e. sup_x M(rule, x)/x. Infinite when M(rule, 0+) > 0.
/// Square matrices only.
inline double nuclear_ball_constant(const ShrinkageRule& rule, AspectRatio beta) {
  if (beta.value() != 1.0) {
    throw UnsupportedAspectRatio("nuclear-norm ball analysis is available for beta = 1 only");
  }
  if (amse_per_value(rule, 0.0, beta) > 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return detail::sup_over_pieces(rule, beta, kAmseSearchMax, 1e-12,
                                 [](double x, double m) { return m / x; })
      .value;
}

inline double nuclear_ball_worst_case(const ShrinkageRule& rule, double xi, AspectRatio beta) {
  if (!(xi > 0.0)) {
    throw DomainError("nuclear-norm radius must be positive");
  }
  return nuclear_ball_constant(rule, beta) * xi;
}

}  // namespace svshrink
