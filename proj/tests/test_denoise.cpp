#include <gtest/gtest.h>

#include <boost/random/mersenne_twister.hpp>
#include <cmath>
#include <limits>

#include "svshrink/denoise.hpp"
#include "svshrink/experiments.hpp"

using namespace svshrink;

namespace {

Matrix gaussian(Eigen::Index m, Eigen::Index n, std::uint64_t seed, double sigma = 1.0) {
  return sigma * draw_noise(NoiseLaw::Gaussian, static_cast<std::size_t>(m),
                            static_cast<std::size_t>(n), seed);
}

// 100 x 100, X = diag(2.5, 1.7, 0, ...), sigma = 1/sqrt(100).
Matrix two_spike_signal() {
  Matrix x = Matrix::Zero(100, 100);
  x(0, 0) = 2.5;
  x(1, 1) = 1.7;
  return x;
}

}  // namespace

TEST(Denoise, KnownSigmaThresholdComparison) {
  const double sigma = 0.3;
  const double unit = std::sqrt(2.0) * sigma;
  Matrix y = Matrix::Zero(2, 2);
  y(0, 0) = 3.0 * unit;
  y(1, 1) = 0.5 * unit;
  const auto r = svht_known_sigma(y, sigma);
  EXPECT_EQ(r.retained_rank, 1u);
  EXPECT_NEAR(r.threshold_used, lambda_star(AspectRatio(1.0)) * unit, 1e-15);
  EXPECT_NEAR(r.denoised(0, 0), 3.0 * unit, 1e-12);
  EXPECT_NEAR(r.denoised(1, 1), 0.0, 1e-12);
}

TEST(Denoise, TieAtThresholdIsKept) {
  Matrix y = Matrix::Zero(3, 3);
  y(0, 0) = 2.0;
  y(1, 1) = 1.0;
  const auto r = apply_rule(y, Hard{1.0 / std::sqrt(3.0)}, 1.0);
  EXPECT_EQ(r.retained_rank, 2u);
}

TEST(Denoise, ZeroMatrix) {
  const Matrix zero = Matrix::Zero(4, 6);
  const auto r = svht_known_sigma(zero, 1.0);
  EXPECT_EQ(r.retained_rank, 0u);
  EXPECT_EQ(r.denoised.norm(), 0.0);
}

TEST(Denoise, ApplyRuleHardEqualsKnownSigma) {
  const Matrix y = gaussian(30, 50, 1, 0.2) + 0.5 * Matrix::Ones(30, 50);
  const double sigma = 0.2;
  const auto a = svht_known_sigma(y, sigma);
  const auto b = apply_rule(y, Hard{lambda_star(AspectRatio::from_shape(30, 50))}, sigma);
  EXPECT_LE((a.denoised - b.denoised).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(a.retained_rank, b.retained_rank);
}

TEST(Denoise, SoftShrinksByExactAmount) {
  const Matrix y = gaussian(20, 40, 2) + 4.0 * Matrix::Ones(20, 40);
  const double sigma = 1.0;
  const AspectRatio beta = AspectRatio::from_shape(20, 40);
  const auto r = apply_rule(y, Soft{bulk_edge(beta)}, sigma);
  const double shift = bulk_edge(beta) * std::sqrt(40.0) * sigma;
  for (std::size_t i = 0; i < r.singular_values_in.size(); ++i) {
    EXPECT_DOUBLE_EQ(r.singular_values_out[i], std::max(r.singular_values_in[i] - shift, 0.0));
    EXPECT_LE(r.singular_values_out[i], r.singular_values_in[i]);
  }
}

TEST(Denoise, OptimalShrinkerOnKnownValue) {
  const double sigma = 0.5;
  const double unit = std::sqrt(2.0) * sigma;
  Matrix y = Matrix::Zero(2, 2);
  y(0, 0) = 2.5 * unit;
  y(1, 1) = 0.1 * unit;
  const auto r = apply_rule(y, OptimalShrink{}, sigma);
  EXPECT_NEAR(r.singular_values_out[0], 1.5 * unit, 1e-12);
  EXPECT_EQ(r.singular_values_out[1], 0.0);
  EXPECT_EQ(r.retained_rank, 1u);
}

TEST(Denoise, TruncateKeepsLeadingValuesRegardlessOfSize) {
  const Matrix y = gaussian(10, 12, 3, 1e-6);
  const auto r = apply_rule(y, Truncate{3}, 1.0);
  EXPECT_EQ(r.retained_rank, 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r.singular_values_out[i], r.singular_values_in[i]);
  EXPECT_EQ(r.threshold_used, r.singular_values_in[2]);
  EXPECT_THROW(apply_rule(y, Truncate{11}, 1.0), RankTooLarge);
}

TEST(Denoise, HardOutputIsKeepKillPartition) {
  const Matrix y = gaussian(40, 40, 4, 0.1) + two_spike_signal().topLeftCorner(40, 40);
  const auto r = svht_known_sigma(y, 0.1);
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < r.singular_values_in.size(); ++i) {
    const double in = r.singular_values_in[i];
    const double out = r.singular_values_out[i];
    EXPECT_TRUE(out == 0.0 || out == in);
    EXPECT_EQ(out == in, in >= r.threshold_used);
    nonzero += out != 0.0;
  }
  EXPECT_EQ(nonzero, r.retained_rank);
}

TEST(Denoise, RetainedRankNonincreasingInThreshold) {
  const Matrix y = gaussian(30, 60, 5, 1.0 / std::sqrt(60.0)) + 0.4 * Matrix::Ones(30, 60);
  const Decomposition d(y);
  std::size_t prev = d.singular_values().size();
  for (double lambda = 0.1; lambda < 6.0; lambda += 0.05) {
    const auto r = apply_rule(d, Hard{lambda}, 1.0 / std::sqrt(60.0));
    EXPECT_LE(r.retained_rank, prev);
    prev = r.retained_rank;
  }
}

TEST(Denoise, HardIsIdempotent) {
  const Matrix y = gaussian(50, 70, 6, 0.1) + 3.0 * Matrix::Identity(50, 70);
  const auto once = svht_known_sigma(y, 0.1);
  const auto twice = svht_known_sigma(once.denoised, 0.1);
  EXPECT_LE((once.denoised - twice.denoised).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Denoise, TransposeEquivariance) {
  const Matrix y = gaussian(35, 60, 7, 0.15) + 2.0 * Matrix::Identity(35, 60);
  const Matrix yt = y.transpose();
  for (const ShrinkageRule& rule :
       {ShrinkageRule{Hard{2.2}}, ShrinkageRule{Soft{1.9}}, ShrinkageRule{Truncate{2}},
        ShrinkageRule{OptimalShrink{}}}) {
    const auto a = apply_rule(y, rule, 0.15);
    const auto b = apply_rule(yt, rule, 0.15);
    EXPECT_FALSE(a.transposed);
    EXPECT_TRUE(b.transposed);
    EXPECT_LE((a.denoised.transpose() - b.denoised).cwiseAbs().maxCoeff(), 1e-10) << to_string(rule);
  }
  const auto u = svht_unknown_sigma(y);
  const auto ut = svht_unknown_sigma(yt);
  EXPECT_LE((u.denoised.transpose() - ut.denoised).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Denoise, UnknownSigmaScaleEquivariance) {
  const Matrix y = gaussian(40, 50, 8, 0.1) + 1.5 * Matrix::Identity(40, 50);
  const auto base = svht_unknown_sigma(y);
  // Power-of-two scaling is exact in floating point.
  const auto scaled = svht_unknown_sigma(Matrix(4.0 * y));
  EXPECT_TRUE((scaled.denoised.array() == 4.0 * base.denoised.array()).all());
  const auto three = svht_unknown_sigma(Matrix(3.0 * y));
  EXPECT_LE((three.denoised - 3.0 * base.denoised).cwiseAbs().maxCoeff(),
            1e-12 * base.denoised.cwiseAbs().maxCoeff());
}

TEST(Denoise, UnknownSigmaReport) {
  const Matrix y = gaussian(60, 80, 9, 0.05);
  const auto r = svht_unknown_sigma(y);
  const AspectRatio beta = AspectRatio::from_shape(60, 80);
  EXPECT_NEAR(r.threshold_used, omega(beta) * detail::median(r.singular_values_in), 1e-12);
  EXPECT_NEAR(r.sigma_used, estimate_sigma(r.singular_values_in, 60, 80), 1e-15);
  EXPECT_NEAR(r.sigma_used, 0.05, 0.005);
  EXPECT_THROW(svht_unknown_sigma(Matrix::Ones(1, 5)), TooSmall);
}

TEST(Denoise, InputValidation) {
  Matrix bad = Matrix::Ones(3, 3);
  bad(1, 2) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(svht_known_sigma(bad, 1.0), NonFiniteInput);
  EXPECT_THROW(svht_unknown_sigma(bad), NonFiniteInput);
  EXPECT_THROW(svht_known_sigma(Matrix(0, 3), 1.0), EmptyInput);
  EXPECT_THROW(svht_known_sigma(Matrix::Ones(3, 3), 0.0), DomainError);
  EXPECT_THROW(svht_known_sigma(Matrix::Ones(3, 3), -1.0), DomainError);
}

TEST(Mse, Examples) {
  const Matrix a = gaussian(5, 7, 10);
  EXPECT_EQ(mse(a, a), 0.0);
  Matrix x = Matrix::Zero(3, 3);
  Matrix xhat = x;
  xhat(1, 2) = 3.0;
  EXPECT_EQ(mse(xhat, x), 9.0);
  EXPECT_THROW(mse(Matrix::Zero(2, 3), Matrix::Zero(3, 2)), ShapeMismatch);
}

TEST(Mse, UnitarilyInvariant) {
  boost::random::mt19937_64 rng(11);
  const Matrix q = haar_columns(8, 8, rng);
  const Matrix p = haar_columns(6, 6, rng);
  const Matrix x = gaussian(8, 6, 12);
  const Matrix xhat = gaussian(8, 6, 13);
  EXPECT_NEAR(mse(q * xhat * p, q * x * p), mse(xhat, x), 1e-9);
}

TEST(DenoiseMonteCarlo, SpikesAboveTheOptimalCutoffAreRetained) {
  // spike_forward(2.0) = 2.5 and spike_forward(2.5) = 2.9 both clear 4/sqrt(3).
  Matrix x = Matrix::Zero(100, 100);
  x(0, 0) = 2.5;
  x(1, 1) = 2.0;
  int known = 0, unknown = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Matrix y = x + gaussian(100, 100, 1000 + seed, 0.1);
    known += svht_known_sigma(y, 0.1).retained_rank == 2;
    unknown += svht_unknown_sigma(y).retained_rank == 2;
  }
  EXPECT_GE(known, 48);
  EXPECT_GE(unknown, 48);
}

TEST(DenoiseMonteCarlo, SpikeBelowTheOptimalCutoffIsUsuallyDropped) {
  // x = 1.7 sits below x* = sqrt(3): its data value 1.7 + 1/1.7 = 2.288 is
  // under the threshold 4/sqrt(3) = 2.309, so the optimal rule drops it
  // except when noise pushes it over. The 2.5 spike always survives.
  const Matrix x = two_spike_signal();
  int both = 0, at_least_one = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Matrix y = x + gaussian(100, 100, 1000 + seed, 0.1);
    const auto r = svht_known_sigma(y, 0.1);
    both += r.retained_rank == 2;
    at_least_one += r.retained_rank >= 1 && r.retained_rank <= 2;
  }
  EXPECT_EQ(at_least_one, 50);
  EXPECT_LT(both, 25);
}

TEST(DenoiseMonteCarlo, PureNoiseRetainsNothing) {
  int empty = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Matrix y = gaussian(200, 200, 2000 + seed, 1.0 / std::sqrt(200.0));
    empty += svht_unknown_sigma(y).retained_rank == 0;
  }
  EXPECT_GE(empty, 48);
}
