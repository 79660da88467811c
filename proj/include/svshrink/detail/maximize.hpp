#pragma once

#include <cmath>
#include <cstddef>

namespace svshrink::detail {

struct Maximum {
  double x;
  double value;
};

// Golden-section search for the maximum of a unimodal f on [a, b].
template <class F>
Maximum golden_section_max(F&& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? Maximum{c, fc} : Maximum{d, fd};
}

// Maximum of a continuous f on the closed interval [lo, hi]: a coarse scan
// locates the best bracket, golden-section refines inside it. Endpoints are
// always candidates.
template <class F>
Maximum maximize_on_interval(F&& f, double lo, double hi, std::size_t scan_points = 2000,
                             double tol = 1e-8) {
  if (!(hi > lo)) {
    return {lo, f(lo)};
  }
  const double step = (hi - lo) / static_cast<double>(scan_points);
  std::size_t best = 0;
  double best_value = f(lo);
  for (std::size_t k = 1; k <= scan_points; ++k) {
    const double x = k == scan_points ? hi : lo + step * static_cast<double>(k);
    const double v = f(x);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  Maximum result{best == scan_points ? hi : lo + step * static_cast<double>(best), best_value};
  const double a = best == 0 ? lo : lo + step * static_cast<double>(best - 1);
  const double b = best + 1 >= scan_points ? hi : lo + step * static_cast<double>(best + 1);
  const Maximum refined = golden_section_max(f, a, b, tol);
  if (refined.value > result.value) {
    result = refined;
  }
  return result;
}

}  // namespace svshrink::detail
