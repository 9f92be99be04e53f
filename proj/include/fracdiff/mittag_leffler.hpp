#pragma once

#include <vector>

#include "fracdiff/errors.hpp"

namespace fracdiff {

/// Evaluation request for the two-parameter Mittag-Leffler function
/// E_{alpha,beta}(z) = sum_k z^k / Gamma(alpha*k + beta).
/// Supported domain: alpha in (0,2], beta in (0,4], z <= 0.
struct MLQuery {
  double alpha;
  double beta;
  double z;
};

/// Tuning constants for the evaluator. The Taylor series is used for
/// |z| <= min(z_switch, precision cap); beyond that the function is computed
/// from its Hankel-cut integral representation (plus a conjugate residue pair
/// when alpha > 1, a confluent finite-interval form when alpha == 1).
struct MLConfig {
  double z_switch = 8.0;
  double quad_tolerance = 1e-13;
};

/// E_{alpha,beta}(z) for z <= 0.
/// Absolute error <= 1e-12 for |z| <= 10, relative error <= 1e-8 for |z| > 10.
double ml_eval(const MLQuery& query, const MLConfig& config = MLConfig{});
double ml_eval(double alpha, double beta, double z, const MLConfig& config = MLConfig{});

/// Elementwise ml_eval; identical to looped scalar calls. Errors report the
/// index of the first offending element.
std::vector<double> ml_batch(double alpha, double beta, const std::vector<double>& zs,
                             const MLConfig& config = MLConfig{});

namespace detail {
/// Largest |z| the Taylor series is allowed to handle for this alpha.
double ml_series_limit(double alpha, const MLConfig& config);
/// Plain truncated series with compensated long-double accumulation.
double ml_series(double alpha, double beta, double z);
/// Integral-representation path (requires |z| > 0.5, no range reduction).
double ml_large(double alpha, double beta, double z, const MLConfig& config);
}  // namespace detail

}  // namespace fracdiff
