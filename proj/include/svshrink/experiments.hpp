#pragma once

// Seeded Monte-Carlo harness for Y = X + Z/sqrt(n).
//
// Every random draw is a pure function of (base_seed, stream, indices), so a
// sweep is reproducible regardless of how trials are scheduled on threads.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/student_t_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <Eigen/Dense>
#include <Eigen/QR>

#include "svshrink/amse.hpp"
#include "svshrink/denoise.hpp"
#include "svshrink/errors.hpp"
#include "svshrink/rules.hpp"

namespace svshrink {

/// Entry distributions, all standardized to mean 0 and variance 1.
enum class NoiseLaw { Gaussian, Rademacher, Uniform, StudentT6 };

enum class SignalMode {
  Diagonal,  // x_i at entry (i, i)
  Haar,      // x_i a_i b_i^T with Haar-distributed orthonormal factors
};

struct ExperimentConfig {
  std::size_t m = 100;
  std::size_t n = 100;
  std::vector<double> spectrum{1.0};
  NoiseLaw noise = NoiseLaw::Gaussian;
  SignalMode signal_mode = SignalMode::Diagonal;
  std::size_t trials = 50;
  std::uint64_t base_seed = 0;
  std::vector<ShrinkageRule> rules;
  std::size_t threads = 1;  // does not affect results
};

struct SweepRecord {
  ShrinkageRule rule;
  double x;
  double analytic_amse;  // NaN where the asymptotic formula does not apply
  double empirical_mse_mean;
  double empirical_mse_stderr;
  std::size_t trials;
  std::uint64_t seed;
  // Regimes where finite-n MSE is known to deviate from AMSE; empty otherwise.
  std::string amse_caveat;
};

struct SweepResult {
  std::vector<SweepRecord> records;  // rule-major, x in grid order
};

inline std::string to_string(NoiseLaw law) {
  switch (law) {
    case NoiseLaw::Gaussian:
      return "gaussian";
    case NoiseLaw::Rademacher:
      return "rademacher";
    case NoiseLaw::Uniform:
      return "uniform";
    case NoiseLaw::StudentT6:
      return "student_t6";
  }
  return "unknown";
}

inline std::string to_string(SignalMode mode) {
  return mode == SignalMode::Diagonal ? "diagonal" : "haar";
}

namespace seeding {

inline constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;
inline constexpr std::uint64_t kSignalStream = 0x7369676e616cULL;

// SplitMix64 finalizer.
inline constexpr std::uint64_t mix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t combine(std::uint64_t seed, std::uint64_t value) noexcept {
  return mix(seed ^ mix(value));
}

/// Seed of noise draw `trial` at grid point `x_index`.
inline constexpr std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial,
                                          std::uint64_t x_index) noexcept {
  return combine(combine(combine(base, kNoiseStream), trial), x_index);
}

/// Seed of the (fixed) signal matrix at grid point `x_index`.
inline constexpr std::uint64_t signal_seed(std::uint64_t base, std::uint64_t x_index) noexcept {
  return combine(combine(base, kSignalStream), x_index);
}

}  // namespace seeding

/// i.i.d. m-by-n noise, deterministic in (law, m, n, seed).
inline Matrix draw_noise(NoiseLaw law, std::size_t m, std::size_t n, std::uint64_t seed) {
  boost::random::mt19937_64 rng(seed);
  Matrix z(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  auto fill = [&](auto&& sample) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      for (Eigen::Index j = 0; j < z.cols(); ++j) {
        z(i, j) = sample();
      }
    }
  };
  switch (law) {
    case NoiseLaw::Gaussian: {
      boost::random::normal_distribution<double> dist(0.0, 1.0);
      fill([&] { return dist(rng); });
      break;
    }
    case NoiseLaw::Rademacher: {
      boost::random::bernoulli_distribution<double> dist(0.5);
      fill([&] { return dist(rng) ? 1.0 : -1.0; });
      break;
    }
    case NoiseLaw::Uniform: {
      boost::random::uniform_real_distribution<double> dist(-0.5, 0.5);
      const double scale = std::sqrt(12.0);
      fill([&] { return scale * dist(rng); });
      break;
    }
    case NoiseLaw::StudentT6: {
      // Var(t_6) = 6/4.
      boost::random::student_t_distribution<double> dist(6.0);
      const double scale = std::sqrt(2.0 / 3.0);
      fill([&] { return scale * dist(rng); });
      break;
    }
  }
  return z;
}

/// First k columns of a Haar-distributed dim-by-dim orthogonal matrix.
inline Matrix haar_columns(std::size_t dim, std::size_t k, boost::random::mt19937_64& rng) {
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(k));
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      g(i, j) = normal(rng);
    }
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
  const Matrix& r = qr.matrixQR();
  // Sign fix: without it the factor is biased by the QR convention.
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (r(j, j) < 0.0) {
      q.col(j) *= -1.0;
    }
  }
  return q;
}

struct Signal {
  Matrix x;
  Matrix left;   // m-by-r, orthonormal columns a_i
  Matrix right;  // n-by-r, orthonormal columns b_i
};

inline Signal make_signal_with_factors(const ExperimentConfig& config, std::uint64_t seed) {
  const std::size_t r = config.spectrum.size();
  if (r > std::min(config.m, config.n)) {
    throw SpectrumTooLong("spectrum has " + std::to_string(r) + " values but min(m, n) = " +
                          std::to_string(std::min(config.m, config.n)));
  }
  const auto m = static_cast<Eigen::Index>(config.m);
  const auto n = static_cast<Eigen::Index>(config.n);
  const auto k = static_cast<Eigen::Index>(r);
  Signal s;
  if (config.signal_mode == SignalMode::Diagonal) {
    s.left = Matrix::Identity(m, k);
    s.right = Matrix::Identity(n, k);
  } else {
    boost::random::mt19937_64 rng(seed);
    s.left = haar_columns(config.m, r, rng);
    s.right = haar_columns(config.n, r, rng);
  }
  const Eigen::Map<const Eigen::VectorXd> values(config.spectrum.data(), k);
  s.x = s.left * values.asDiagonal() * s.right.transpose();
  return s;
}

inline Matrix make_signal(const ExperimentConfig& config, std::uint64_t seed) {
  return make_signal_with_factors(config, seed).x;
}

namespace detail {

template <class Task>
void parallel_for(std::size_t count, std::size_t threads, Task&& task) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      task(i);
    }
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < count; i += threads) {
          task(i);
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) {
    th.join();
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

inline std::string amse_caveat(const ShrinkageRule& rule, AspectRatio beta, std::size_t rank,
                               std::size_t m) {
  std::string caveat;
  if (const auto* h = std::get_if<Hard>(&rule); h && h->lambda < bulk_edge(beta) + 0.1) {
    caveat = "threshold_near_bulk_edge";
  }
  if (static_cast<double>(rank) > 0.05 * static_cast<double>(m)) {
    caveat += caveat.empty() ? "" : ";";
    caveat += "nontrivial_rank_fraction";
  }
  return caveat;
}

inline double analytic_amse_or_nan(const ShrinkageRule& rule, double x, std::size_t rank,
                                   AspectRatio beta) {
  if (const auto* t = std::get_if<Truncate>(&rule); t && t->rank != rank) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  try {
    return static_cast<double>(rank) * amse_per_value(rule, x, beta);
  } catch (const BulkThresholdError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace detail

/// MSE-vs-AMSE sweep. At grid point x the signal has rank r = spectrum size
/// with every singular value equal to x; it is drawn once per grid point and
/// the same noise draws are shared by every rule.
inline SweepResult run_sweep(const ExperimentConfig& config, std::span<const double> x_grid) {
  if (config.trials < 1) {
    throw DomainError("trials must be >= 1");
  }
  if (config.spectrum.empty()) {
    throw InvalidSpectrum("sweep needs a spectrum of rank >= 1");
  }
  for (const auto& rule : config.rules) {
    validate(rule);
    if (const auto* t = std::get_if<Truncate>(&rule); t && t->rank > std::min(config.m, config.n)) {
      throw RankTooLarge("truncation rank exceeds min(m, n)");
    }
  }
  const std::size_t rank = config.spectrum.size();
  const AspectRatio beta = AspectRatio::from_shape(config.m, config.n);
  const double sigma = 1.0 / std::sqrt(static_cast<double>(std::max(config.m, config.n)));
  const std::size_t nrules = config.rules.size();

  // mse[rule][x][trial]
  std::vector<std::vector<std::vector<double>>> mse(
      nrules, std::vector<std::vector<double>>(x_grid.size(), std::vector<double>(config.trials)));

  for (std::size_t xi = 0; xi < x_grid.size(); ++xi) {
    if (!(x_grid[xi] >= 0.0)) {
      throw DomainError("sweep grid values must be nonnegative");
    }
    ExperimentConfig at_x = config;
    at_x.spectrum.assign(rank, x_grid[xi]);
    const Matrix signal = make_signal(at_x, seeding::signal_seed(config.base_seed, xi));
    detail::parallel_for(config.trials, config.threads, [&](std::size_t t) {
      const Matrix y = signal + sigma * draw_noise(config.noise, config.m, config.n,
                                                   seeding::trial_seed(config.base_seed, t, xi));
      const Decomposition d(y);
      for (std::size_t k = 0; k < nrules; ++k) {
        mse[k][xi][t] = svshrink::mse(apply_rule(d, config.rules[k], sigma).denoised, signal);
      }
    });
  }

  SweepResult result;
  for (std::size_t k = 0; k < nrules; ++k) {
    for (std::size_t xi = 0; xi < x_grid.size(); ++xi) {
      const auto& samples = mse[k][xi];
      double mean = 0.0;
      for (double v : samples) {
        mean += v;
      }
      mean /= static_cast<double>(samples.size());
      double ss = 0.0;
      for (double v : samples) {
        ss += (v - mean) * (v - mean);
      }
      const double count = static_cast<double>(samples.size());
      const double stderr_ = samples.size() > 1 ? std::sqrt(ss / (count - 1.0) / count) : 0.0;
      result.records.push_back(
          {config.rules[k], x_grid[xi],
           detail::analytic_amse_or_nan(config.rules[k], x_grid[xi], rank, beta), mean, stderr_,
           config.trials, config.base_seed,
           detail::amse_caveat(config.rules[k], beta, rank, std::min(config.m, config.n))});
    }
  }
  return result;
}

struct SpikeConvergenceRow {
  std::size_t m;
  std::size_t n;
  double mean_y1;
  double limit_y1;
  double mean_cos2_left;
  double limit_cos2_left;
  double mean_cos2_right;
  double limit_cos2_right;
};

/// Finite-n behaviour of the top singular triple for a rank-one diagonal
/// signal x in Gaussian noise, against its asymptotic limits. m = round(beta n).
inline std::vector<SpikeConvergenceRow> spike_convergence_check(std::span<const std::size_t> n_list,
                                                                double x, AspectRatio beta,
                                                                std::size_t trials,
                                                                std::uint64_t seed,
                                                                std::size_t threads = 1) {
  if (!(x > beta.quarter_root())) {
    throw DomainError("spike convergence needs x above beta^(1/4)");
  }
  if (trials < 1) {
    throw DomainError("trials must be >= 1");
  }
  const SpikeGeometry limit = spike_geometry(x, beta);
  std::vector<SpikeConvergenceRow> rows;
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const std::size_t n = n_list[ni];
    const auto m = static_cast<std::size_t>(std::lround(beta.value() * static_cast<double>(n)));
    if (m < 1) {
      throw DomainError("n too small for the requested aspect ratio");
    }
    const double sigma = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<double> y1(trials), cl(trials), cr(trials);
    detail::parallel_for(trials, threads, [&](std::size_t t) {
      Matrix y = sigma * draw_noise(NoiseLaw::Gaussian, m, n, seeding::trial_seed(seed, t, ni));
      y(0, 0) += x;
      const Decomposition d(y);
      y1[t] = d.singular_values().front();
      cl[t] = d.left()(0, 0) * d.left()(0, 0);
      cr[t] = d.right()(0, 0) * d.right()(0, 0);
    });
    auto mean = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double e : v) {
        s += e;
      }
      return s / static_cast<double>(v.size());
    };
    rows.push_back({m, n, mean(y1), limit.y, mean(cl), limit.cos2_left, mean(cr), limit.cos2_right});
  }
  return rows;
}

}  // namespace svshrink
