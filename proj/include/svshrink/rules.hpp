#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "svshrink/errors.hpp"
#include "svshrink/mp_law.hpp"
#include "svshrink/thresholds.hpp"

namespace svshrink {

// Shrinkage rules act on bulk-normalized singular values y (noise scaled so
// the bulk edge sits at 1 + sqrt(beta)).

/// Keep y when y >= lambda, otherwise zero.
struct Hard {
  double lambda;
};

/// (y - s)_+
struct Soft {
  double s;
};

/// Keep the `rank` largest singular values, whatever their size.
struct Truncate {
  std::size_t rank;
};

/// Pointwise AMSE-optimal shrinker.
struct OptimalShrink {};

using ShrinkageRule = std::variant<Hard, Soft, Truncate, OptimalShrink>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline void validate(const ShrinkageRule& rule) {
  std::visit(overloaded{
                 [](const Hard& h) {
                   if (!(h.lambda > 0.0) || !std::isfinite(h.lambda)) {
                     throw DomainError("hard threshold must be positive and finite");
                   }
                 },
                 [](const Soft& s) {
                   if (!(s.s >= 0.0) || !std::isfinite(s.s)) {
                     throw DomainError("soft threshold must be nonnegative and finite");
                   }
                 },
                 [](const Truncate&) {},
                 [](const OptimalShrink&) {},
             },
             rule);
}

namespace detail {

inline std::string format_g(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline double parse_double(std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

inline std::size_t parse_count(std::string_view text) {
  std::size_t v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError("not a nonnegative integer: '" + std::string(text) + "'");
  }
  return v;
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace detail

/// Stable textual label, e.g. "hard:2.3094010767585", "tsvd:1", "opt".
inline std::string to_string(const ShrinkageRule& rule) {
  return std::visit(overloaded{
                        [](const Hard& h) { return "hard:" + detail::format_g(h.lambda, 14); },
                        [](const Soft& s) { return "soft:" + detail::format_g(s.s, 14); },
                        [](const Truncate& t) { return "tsvd:" + std::to_string(t.rank); },
                        [](const OptimalShrink&) { return std::string("opt"); },
                    },
                    rule);
}

/// Parse a rule label. Bare names take their tuned defaults:
///   hard -> Hard(lambda_star(beta)), soft -> Soft(1 + sqrt(beta)),
///   tsvd -> Truncate(default_rank), opt -> OptimalShrink.
inline ShrinkageRule parse_rule(std::string_view text, AspectRatio beta, std::size_t default_rank) {
  text = detail::trim(text);
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  const std::string_view arg =
      colon == std::string_view::npos ? std::string_view{} : detail::trim(text.substr(colon + 1));
  ShrinkageRule rule;
  if (name == "hard") {
    rule = Hard{arg.empty() ? lambda_star(beta) : detail::parse_double(arg)};
  } else if (name == "soft") {
    rule = Soft{arg.empty() ? bulk_edge(beta) : detail::parse_double(arg)};
  } else if (name == "tsvd") {
    rule = Truncate{arg.empty() ? default_rank : detail::parse_count(arg)};
  } else if (name == "opt" && arg.empty()) {
    rule = OptimalShrink{};
  } else {
    throw ParseError("unknown shrinkage rule '" + std::string(text) + "'");
  }
  try {
    validate(rule);
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  return rule;
}

/// Signal singular values x_1 >= ... >= x_r > 0.
class Spectrum {
 public:
  Spectrum() = default;
  explicit Spectrum(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
        throw InvalidSpectrum("spectrum entries must be positive and finite");
      }
      if (i > 0 && values_[i] > values_[i - 1]) {
        throw InvalidSpectrum("spectrum must be nonincreasing");
      }
    }
  }

  std::size_t rank() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

 private:
  std::vector<double> values_;
};

}  // namespace svshrink
