#pragma once

// Text formats: matrix CSV, sweep/curve CSV, JSON records, and the
// key = value sweep configuration file.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "svshrink/amse.hpp"
#include "svshrink/denoise.hpp"
#include "svshrink/errors.hpp"
#include "svshrink/experiments.hpp"
#include "svshrink/rules.hpp"
#include "svshrink/thresholds.hpp"

namespace svshrink::io {

/// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
inline std::string format_number(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  return svshrink::detail::format_g(v, 17);
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(svshrink::detail::trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) {
      break;
    }
    start = pos + 1;
  }
  return out;
}

inline bool try_parse_double(std::string_view text, double& out) {
  try {
    out = svshrink::detail::parse_double(text);
    return true;
  } catch (const ParseError&) {
    return false;
  }
}

}  // namespace detail

/// Dense matrix from CSV: one row per line, comma-separated numbers. A first
/// line containing a non-numeric field is treated as a header and skipped.
/// Blank lines are ignored; rows of unequal length are an error.
inline Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (svshrink::detail::trim(line).empty()) {
      continue;
    }
    const auto fields = detail::split(line, ',');
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      numeric = numeric && detail::try_parse_double(fields[j], row[j]);
    }
    if (!numeric) {
      if (rows.empty() && line_no == 1) {
        continue;  // header
      }
      throw ParseError("non-numeric field on line " + std::to_string(line_no));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("ragged CSV: line " + std::to_string(line_no) + " has " +
                       std::to_string(row.size()) + " fields, expected " +
                       std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw ParseError("CSV contains no numeric rows");
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

inline Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open '" + path + "'");
  }
  return read_matrix_csv(in);
}

inline void write_matrix_csv(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) {
        out << ',';
      }
      out << format_number(m(i, j));
    }
    out << '\n';
  }
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "rule,x,amse,mse_mean,mse_stderr,trials\n";
  for (const auto& r : result.records) {
    out << to_string(r.rule) << ',' << format_number(r.x) << ',' << format_number(r.analytic_amse)
        << ',' << format_number(r.empirical_mse_mean) << ','
        << format_number(r.empirical_mse_stderr) << ',' << r.trials << '\n';
  }
}

inline void write_amse_curve_csv(std::ostream& out, const AmseCurve& curve) {
  out << "x,amse\n";
  for (const auto& p : curve) {
    out << format_number(p.x) << ',' << format_number(p.amse) << '\n';
  }
}

// JSON. Non-finite numbers become null.

inline nlohmann::json number_json(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline nlohmann::json to_json(const DenoiseReport& report) {
  return {
      {"rule", to_string(report.rule)},
      {"threshold", number_json(report.threshold_used)},
      {"sigma", number_json(report.sigma_used)},
      {"retained_rank", report.retained_rank},
      {"rows", report.denoised.rows()},
      {"cols", report.denoised.cols()},
      {"transposed", report.transposed},
      {"singular_values_in", report.singular_values_in},
      {"singular_values_out", report.singular_values_out},
  };
}

inline nlohmann::json to_json(const SweepResult& result) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : result.records) {
    records.push_back({
        {"rule", to_string(r.rule)},
        {"x", r.x},
        {"amse", number_json(r.analytic_amse)},
        {"mse_mean", number_json(r.empirical_mse_mean)},
        {"mse_stderr", number_json(r.empirical_mse_stderr)},
        {"trials", r.trials},
        {"seed", r.seed},
        {"amse_caveat", r.amse_caveat},
    });
  }
  return {{"records", records}};
}

inline nlohmann::json to_json(const AmseCurve& curve) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : curve) {
    points.push_back({{"x", p.x}, {"amse", number_json(p.amse)}});
  }
  return points;
}

inline nlohmann::json to_json(const ThresholdCoefficients& c) {
  return {
      {"beta", c.beta.value()},
      {"lambda_star", c.lambda_star},
      {"omega", c.omega},
      {"mu_beta", c.mu_beta},
      {"bulk_edge", bulk_edge(c.beta)},
  };
}

/// Sweep configuration: an ExperimentConfig plus the signal grid.
struct SweepSpec {
  ExperimentConfig config;
  std::vector<double> x_grid;
};

/// 1.0, 1.25, ..., 4.0
inline std::vector<double> default_x_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 12; ++k) {
    grid.push_back(1.0 + 0.25 * k);
  }
  return grid;
}

/// "a:step:b" (inclusive range) or a comma-separated list.
inline std::vector<double> parse_grid(std::string_view text) {
  const auto parts = detail::split(text, ':');
  if (parts.size() == 3) {
    const double a = svshrink::detail::parse_double(parts[0]);
    const double step = svshrink::detail::parse_double(parts[1]);
    const double b = svshrink::detail::parse_double(parts[2]);
    if (!(step > 0.0) || !(b >= a)) {
      throw ParseError("grid range needs step > 0 and end >= start");
    }
    const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
    std::vector<double> grid;
    for (long k = 0; k < count; ++k) {
      grid.push_back(a + step * static_cast<double>(k));
    }
    return grid;
  }
  if (parts.size() != 1) {
    throw ParseError("grid must be 'start:step:end' or a comma-separated list");
  }
  std::vector<double> grid;
  for (auto field : detail::split(text, ',')) {
    grid.push_back(svshrink::detail::parse_double(field));
  }
  return grid;
}

/// Parse the plain-text sweep configuration:
///
///   # comment
///   m = 100
///   n = 100
///   spectrum = 1.0            # or: rank = 2
///   noise = gaussian          # gaussian | rademacher | uniform | student_t6
///   signal = haar             # diagonal | haar
///   trials = 50
///   seed = 7
///   rules = hard, tsvd        # see parse_rule
///   x_grid = 1:0.25:4         # or a list: 1.5, 2, 3
///
/// Unknown keys are errors.
inline SweepSpec parse_sweep_config(std::istream& in) {
  SweepSpec spec;
  spec.x_grid = default_x_grid();
  std::vector<std::string> rule_texts{"hard", "tsvd"};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    view = view.substr(0, view.find('#'));
    view = svshrink::detail::trim(view);
    if (view.empty()) {
      continue;
    }
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = svshrink::detail::trim(view.substr(0, eq));
    const auto value = svshrink::detail::trim(view.substr(eq + 1));
    auto& c = spec.config;
    try {
      if (key == "m") {
        c.m = svshrink::detail::parse_count(value);
      } else if (key == "n") {
        c.n = svshrink::detail::parse_count(value);
      } else if (key == "spectrum") {
        c.spectrum.clear();
        for (auto f : detail::split(value, ',')) {
          c.spectrum.push_back(svshrink::detail::parse_double(f));
        }
        static_cast<void>(Spectrum{c.spectrum});
      } else if (key == "rank") {
        c.spectrum.assign(svshrink::detail::parse_count(value), 1.0);
      } else if (key == "noise") {
        if (value == "gaussian") {
          c.noise = NoiseLaw::Gaussian;
        } else if (value == "rademacher") {
          c.noise = NoiseLaw::Rademacher;
        } else if (value == "uniform") {
          c.noise = NoiseLaw::Uniform;
        } else if (value == "student_t6") {
          c.noise = NoiseLaw::StudentT6;
        } else {
          throw ParseError("unknown noise law '" + std::string(value) + "'");
        }
      } else if (key == "signal") {
        if (value == "diagonal") {
          c.signal_mode = SignalMode::Diagonal;
        } else if (value == "haar") {
          c.signal_mode = SignalMode::Haar;
        } else {
          throw ParseError("unknown signal mode '" + std::string(value) + "'");
        }
      } else if (key == "trials") {
        c.trials = svshrink::detail::parse_count(value);
      } else if (key == "seed") {
        std::uint64_t seed = 0;
        const auto* end = value.data() + value.size();
        auto [ptr, ec] = std::from_chars(value.data(), end, seed);
        if (ec != std::errc{} || ptr != end) {
          throw ParseError("bad seed");
        }
        c.base_seed = seed;
      } else if (key == "rules") {
        rule_texts.clear();
        for (auto f : detail::split(value, ',')) {
          rule_texts.emplace_back(f);
        }
      } else if (key == "x_grid") {
        spec.x_grid = parse_grid(value);
      } else {
        throw ParseError("unknown key '" + std::string(key) + "'");
      }
    } catch (const Error& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }

  auto& c = spec.config;
  if (c.m < 1 || c.n < 1) {
    throw ParseError("m and n must be >= 1");
  }
  if (c.trials < 1) {
    throw ParseError("trials must be >= 1");
  }
  if (c.spectrum.empty()) {
    throw ParseError("spectrum must have at least one value");
  }
  if (c.spectrum.size() > std::min(c.m, c.n)) {
    throw SpectrumTooLong("spectrum has " + std::to_string(c.spectrum.size()) +
                          " values but min(m, n) = " + std::to_string(std::min(c.m, c.n)));
  }
  for (double x : spec.x_grid) {
    if (!(x >= 0.0)) {
      throw ParseError("x_grid values must be nonnegative");
    }
  }
  const AspectRatio beta = AspectRatio::from_shape(c.m, c.n);
  c.rules.clear();
  for (const auto& text : rule_texts) {
    c.rules.push_back(parse_rule(text, beta, c.spectrum.size()));
    if (const auto* t = std::get_if<Truncate>(&c.rules.back());
        t && t->rank > std::min(c.m, c.n)) {
      throw ParseError("truncation rank exceeds min(m, n)");
    }
  }
  return spec;
}

inline SweepSpec parse_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open '" + path + "'");
  }
  return parse_sweep_config(in);
}

}  // namespace svshrink::io
