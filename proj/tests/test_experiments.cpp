#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <set>
#include <vector>

#include "svshrink/experiments.hpp"

using namespace svshrink;

namespace {

ExperimentConfig square_config(std::size_t n, std::vector<ShrinkageRule> rules, std::size_t trials,
                               NoiseLaw law = NoiseLaw::Gaussian) {
  ExperimentConfig c;
  c.m = n;
  c.n = n;
  c.spectrum = {1.0};
  c.noise = law;
  c.signal_mode = SignalMode::Haar;
  c.trials = trials;
  c.base_seed = 2024;
  c.rules = std::move(rules);
  return c;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

bool identical(const SweepResult& a, const SweepResult& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& r = a.records[i];
    const auto& s = b.records[i];
    if (!same_bits(r.x, s.x) || !same_bits(r.empirical_mse_mean, s.empirical_mse_mean) ||
        !same_bits(r.empirical_mse_stderr, s.empirical_mse_stderr) || r.trials != s.trials ||
        r.seed != s.seed || to_string(r.rule) != to_string(s.rule)) {
      return false;
    }
  }
  return true;
}

}  // namespace

class NoiseStandardization : public ::testing::TestWithParam<NoiseLaw> {};

TEST_P(NoiseStandardization, MeanZeroVarianceOne) {
  const Matrix z = draw_noise(GetParam(), 1000, 1000, 77);
  const double mean = z.mean();
  const double var = (z.array() - mean).square().sum() / (z.size() - 1.0);
  EXPECT_NEAR(mean, 0.0, 5e-3) << to_string(GetParam());
  EXPECT_NEAR(var, 1.0, 5e-3) << to_string(GetParam());
}

INSTANTIATE_TEST_SUITE_P(AllLaws, NoiseStandardization,
                         ::testing::Values(NoiseLaw::Gaussian, NoiseLaw::Rademacher,
                                           NoiseLaw::Uniform, NoiseLaw::StudentT6));

TEST(Noise, SupportOfEachLaw) {
  const Matrix r = draw_noise(NoiseLaw::Rademacher, 50, 60, 1);
  EXPECT_TRUE((r.array().abs() == 1.0).all());
  const Matrix u = draw_noise(NoiseLaw::Uniform, 50, 60, 1);
  EXPECT_LE(u.cwiseAbs().maxCoeff(), std::sqrt(3.0));
  const Matrix t = draw_noise(NoiseLaw::StudentT6, 50, 60, 1);
  EXPECT_TRUE(t.allFinite());
}

TEST(Noise, DeterministicInSeed) {
  for (auto law : {NoiseLaw::Gaussian, NoiseLaw::Rademacher, NoiseLaw::Uniform, NoiseLaw::StudentT6}) {
    EXPECT_TRUE((draw_noise(law, 7, 9, 5).array() == draw_noise(law, 7, 9, 5).array()).all());
    EXPECT_FALSE((draw_noise(law, 7, 9, 5).array() == draw_noise(law, 7, 9, 6).array()).all());
  }
}

TEST(Seeding, DistinctStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t t = 0; t < 50; ++t) {
    for (std::uint64_t x = 0; x < 20; ++x) {
      seen.insert(seeding::trial_seed(9, t, x));
    }
  }
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(seeding::trial_seed(9, 0, 0), seeding::trial_seed(10, 0, 0));
  EXPECT_NE(seeding::trial_seed(9, 1, 0), seeding::trial_seed(9, 0, 1));
}

TEST(Signal, DiagonalPlacement) {
  ExperimentConfig c;
  c.m = 100;
  c.n = 100;
  c.spectrum = {2.5, 1.7};
  c.signal_mode = SignalMode::Diagonal;
  const Matrix x = make_signal(c, 0);
  Matrix expected = Matrix::Zero(100, 100);
  expected(0, 0) = 2.5;
  expected(1, 1) = 1.7;
  EXPECT_TRUE((x.array() == expected.array()).all());
}

TEST(Signal, HaarFactorsAreOrthonormalAndSpectrumExact) {
  ExperimentConfig c;
  c.m = 40;
  c.n = 70;
  c.spectrum = {3.0, 2.0, 0.5};
  c.signal_mode = SignalMode::Haar;
  const Signal s = make_signal_with_factors(c, 31);
  EXPECT_LE((s.left.transpose() * s.left - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((s.right.transpose() * s.right - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Matrix>(s.x).singularValues();
  EXPECT_NEAR(sv(0), 3.0, 1e-10);
  EXPECT_NEAR(sv(1), 2.0, 1e-10);
  EXPECT_NEAR(sv(2), 0.5, 1e-10);
  EXPECT_NEAR(sv(3), 0.0, 1e-10);
}

TEST(Signal, HaarFactorIsUnbiased) {
  // For a uniformly random unit vector in R^d, E[q_1] = 0 and E[q_1^2] = 1/d.
  // Householder QR without the sign fix gives q_1 a definite sign.
  boost::random::mt19937_64 rng(5);
  const int draws = 4000;
  const double d = 6.0;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    const Matrix q = haar_columns(6, 2, rng);
    sum += q(0, 0);
    sum2 += q(0, 0) * q(0, 0);
  }
  EXPECT_NEAR(sum / draws, 0.0, 4.0 * std::sqrt(1.0 / d / draws));
  EXPECT_NEAR(sum2 / draws, 1.0 / d, 0.015);
}

TEST(Signal, SpectrumTooLong) {
  ExperimentConfig c;
  c.m = 2;
  c.n = 5;
  c.spectrum = {1.0, 1.0, 1.0};
  EXPECT_THROW(make_signal(c, 0), SpectrumTooLong);
}

TEST(Sweep, ShapeAndAnnotations) {
  ExperimentConfig c = square_config(20, {Hard{2.05}, Truncate{1}, OptimalShrink{}}, 2);
  const std::vector<double> grid{0.5, 1.5, 2.5};
  const SweepResult r = run_sweep(c, grid);
  ASSERT_EQ(r.records.size(), 9u);
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& rec = r.records[k * 3 + i];
      EXPECT_EQ(rec.x, grid[i]);
      EXPECT_EQ(rec.trials, 2u);
      EXPECT_GE(rec.empirical_mse_stderr, 0.0);
      EXPECT_FALSE(std::isnan(rec.analytic_amse));
    }
  }
  EXPECT_EQ(r.records[0].amse_caveat, "threshold_near_bulk_edge");
  EXPECT_EQ(r.records[3].amse_caveat, "");
}

TEST(Sweep, CaveatForLargeRankFraction) {
  ExperimentConfig c = square_config(20, {Truncate{2}}, 1);
  c.spectrum = {1.0, 1.0};
  const std::vector<double> grid{2.0};
  EXPECT_EQ(run_sweep(c, grid).records[0].amse_caveat, "nontrivial_rank_fraction");
}

TEST(Sweep, SharedNoiseAcrossRules) {
  ExperimentConfig c = square_config(30, {Hard{2.4}, Hard{2.4}, OptimalShrink{}}, 5);
  const std::vector<double> grid{1.0, 2.0};
  const SweepResult r = run_sweep(c, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_TRUE(same_bits(r.records[i].empirical_mse_mean, r.records[2 + i].empirical_mse_mean));
  }
}

TEST(Sweep, DeterministicAcrossRunsAndThreads) {
  ExperimentConfig c = square_config(40, {Hard{lambda_star(AspectRatio(1.0))}, Truncate{1}}, 7);
  const std::vector<double> grid{1.0, 2.0, 3.0};
  const SweepResult a = run_sweep(c, grid);
  const SweepResult b = run_sweep(c, grid);
  c.threads = 3;
  const SweepResult d = run_sweep(c, grid);
  EXPECT_TRUE(identical(a, b));
  EXPECT_TRUE(identical(a, d));
  c.trials = 1;
  c.threads = 1;
  EXPECT_TRUE(identical(run_sweep(c, grid), run_sweep(c, grid)));
}

TEST(Sweep, ValidatesConfig) {
  ExperimentConfig c = square_config(10, {Truncate{11}}, 1);
  const std::vector<double> grid{1.0};
  EXPECT_THROW(run_sweep(c, grid), RankTooLarge);
  // Sub-bulk thresholds run empirically but have no finite AMSE.
  c.rules = {Hard{1.0}};
  EXPECT_TRUE(std::isnan(run_sweep(c, grid).records.at(0).analytic_amse));
  c.rules = {Hard{-1.0}};
  EXPECT_THROW(run_sweep(c, grid), DomainError);
  c.rules = {Hard{3.0}};
  c.trials = 0;
  EXPECT_THROW(run_sweep(c, grid), DomainError);
  c.trials = 1;
  c.spectrum.assign(11, 1.0);
  EXPECT_THROW(run_sweep(c, grid), SpectrumTooLong);
}

TEST(SweepMonteCarlo, HardThresholdMatchesAmseAtHighSnr) {
  const ExperimentConfig c = square_config(100, {Hard{4.0 / std::sqrt(3.0)}}, 50);
  const std::vector<double> grid{3.0};
  const auto rec = run_sweep(c, grid).records.at(0);
  EXPECT_LE(std::abs(rec.empirical_mse_mean - rec.analytic_amse), 0.10 * rec.analytic_amse);
}

TEST(SweepMonteCarlo, PureNoiseRetainsNothing) {
  const ExperimentConfig c = square_config(100, {Hard{4.0 / std::sqrt(3.0)}}, 50);
  const std::vector<double> grid{0.0};
  EXPECT_LE(run_sweep(c, grid).records.at(0).empirical_mse_mean, 0.05);
}

TEST(SweepMonteCarlo, OptimalHardThresholdBeatsTsvd) {
  const ExperimentConfig c = square_config(100, {Hard{4.0 / std::sqrt(3.0)}, Truncate{1}}, 50);
  std::vector<double> grid;
  for (int k = 0; k <= 12; ++k) grid.push_back(1.0 + 0.25 * k);
  const SweepResult r = run_sweep(c, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& hard = r.records[i];
    const auto& tsvd = r.records[grid.size() + i];
    EXPECT_LE(hard.empirical_mse_mean, tsvd.empirical_mse_mean + 2.0 * tsvd.empirical_mse_stderr)
        << "x " << grid[i];
  }
}

TEST(SpikeConvergence, TopValueAndAlignment) {
  const std::vector<std::size_t> n100{100};
  const auto row = spike_convergence_check(n100, 1.7, AspectRatio(1.0), 50, 3).at(0);
  EXPECT_NEAR(row.limit_y1, 1.7 + 1.0 / 1.7, 1e-12);
  EXPECT_NEAR(row.mean_y1, 2.288, 0.15);
  const std::vector<std::size_t> n400{400};
  const auto big = spike_convergence_check(n400, std::sqrt(3.0), AspectRatio(1.0), 50, 4).at(0);
  EXPECT_NEAR(big.mean_cos2_left, 2.0 / 3.0, 0.05);
  EXPECT_NEAR(big.mean_cos2_right, 2.0 / 3.0, 0.05);
}

TEST(SpikeConvergence, DeviationShrinksWithN) {
  const std::vector<std::size_t> ns{50, 400};
  const auto rows = spike_convergence_check(ns, 1.7, AspectRatio(1.0), 50, 8);
  EXPECT_LE(std::abs(rows[1].mean_y1 - rows[1].limit_y1), std::abs(rows[0].mean_y1 - rows[0].limit_y1));
}

TEST(SpikeConvergence, RejectsUndetectableSignal) {
  const std::vector<std::size_t> ns{50};
  EXPECT_THROW(spike_convergence_check(ns, 0.9, AspectRatio(1.0), 5, 1), DomainError);
}
