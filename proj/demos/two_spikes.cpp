// Scree of a 100 x 100 sample with two planted singular values (1.7 and 2.5)
// in bulk-normalized Gaussian noise, and what optimal hard thresholding keeps.
//
//   two_spikes [seed]

#include <cstdint>
#include <cstdio>
#include <cstdlib>

#include "svshrink/svshrink.hpp"

int main(int argc, char** argv) {
  using namespace svshrink;
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  const std::size_t n = 100;
  const double sigma = 0.1;

  Matrix x = Matrix::Zero(n, n);
  x(0, 0) = 1.7;
  x(1, 1) = 2.5;
  const Matrix y = x + sigma * draw_noise(NoiseLaw::Gaussian, n, n, seed);
  const AspectRatio one(1.0);

  const DenoiseReport known = svht_known_sigma(y, sigma);
  const DenoiseReport blind = svht_unknown_sigma(y);

  std::printf("top data singular values vs their limits\n");
  for (int i = 0; i < 2; ++i) {
    const double xi = x(1 - i, 1 - i);
    std::printf("  x = %.1f   y = %.4f   limit %.4f\n", xi, known.singular_values_in[i],
                spike_forward(xi, one));
  }
  std::printf("  third value %.4f, bulk edge %.4f\n", known.singular_values_in[2], bulk_edge(one));
  std::printf("\nknown sigma    tau = %.4f   kept %zu   mse %.4f\n", known.threshold_used,
              known.retained_rank, mse(known.denoised, x));
  std::printf("unknown sigma  tau = %.4f   kept %zu   mse %.4f   sigma_hat %.5f\n",
              blind.threshold_used, blind.retained_rank, mse(blind.denoised, x), blind.sigma_used);
  const DenoiseReport tsvd = apply_rule(y, Truncate{2}, sigma);
  std::printf("tsvd rank 2                kept 2   mse %.4f\n", mse(tsvd.denoised, x));
  std::printf("\nasymptotic loss: hard %.4f, tsvd %.4f\n",
              amse(Hard{lambda_star(one)}, Spectrum({2.5, 1.7}), one),
              amse(Truncate{2}, Spectrum({2.5, 1.7}), one));
  return 0;
}
