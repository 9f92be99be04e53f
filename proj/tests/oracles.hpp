#pragma once

// Test-only reference computations, kept independent of the library paths
// they are used to check.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <vector>

namespace oracles {

using big = boost::multiprecision::cpp_bin_float_50;

/// Truncated Mittag-Leffler series summed in 50-digit floats. Usable while the
/// largest term stays ~30 digits above the result, i.e. |z|^{1/alpha} <~ 70.
inline double ml_series_big(double alpha, double beta, double z, int max_terms = 2000) {
  const big zb(z);
  big sum = 0;
  big term;
  for (int k = 0; k < max_terms; ++k) {
    term = boost::multiprecision::pow(zb, k) /
           boost::multiprecision::tgamma(big(alpha) * k + big(beta));
    sum += term;
    if (k > 8 && boost::multiprecision::abs(term) <
                     big("1e-40") * (1 + boost::multiprecision::abs(sum)))
      break;
  }
  return static_cast<double>(sum);
}

/// Scaled complementary error function e^{x^2} erfc(x) for x >= 0.
inline double erfcx(double x) {
  if (x < 12.0) return std::exp(x * x) * std::erfc(x);
  // Asymptotic tail; relative error below 1e-16 for x >= 12.
  const double inv2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 12; ++k) {
    term *= -(2 * k - 1) * inv2x2;
    sum += term;
  }
  return sum / (x * std::sqrt(M_PI));
}

/// Simple composite Simpson quadrature on [a,b].
template <typename F>
double simpson(F&& f, double a, double b, int n_panels) {
  const double h = (b - a) / n_panels;
  double sum = f(a) + f(b);
  for (int i = 1; i < n_panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

}  // namespace oracles
