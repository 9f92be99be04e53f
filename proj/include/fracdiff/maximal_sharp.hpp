#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "fracdiff/field.hpp"

namespace fracdiff {

/// Anisotropic space-time metric |t-s|^{a/2} + |x-y|; a metric for a in (0,2).
struct ParabolicMetricSpec {
  double alpha = 1.0;
  int dim = 1;
};

struct SpaceTimePoint {
  double t = 0.0;
  std::array<double, 2> x = {0.0, 0.0};
};

double parabolic_distance(const ParabolicMetricSpec& spec, const SpaceTimePoint& a,
                          const SpaceTimePoint& b);

/// Centered space-time cube: time extent delta^{2/a}, space side delta.
struct ParabolicCube {
  double alpha = 1.0;
  int dim = 1;
  double delta = 1.0;
  SpaceTimePoint anchor;

  double time_half_extent() const { return 0.5 * std::pow(delta, 2.0 / alpha); }
  double volume() const { return std::pow(delta, 2.0 / alpha + dim); }
  bool contains(const SpaceTimePoint& p) const {
    if (std::abs(p.t - anchor.t) > time_half_extent()) return false;
    for (int i = 0; i < dim; ++i)
      if (std::abs(p.x[i] - anchor.x[i]) > 0.5 * delta) return false;
    return true;
  }
};

/// Metric-ball volume c(a,d) r^{2/a+d}; the shape constant is evaluated once
/// by quadrature per call.
double ball_measure(const ParabolicMetricSpec& spec, double r);

/// Independent Monte-Carlo estimate of the same volume.
double ball_measure_monte_carlo(const ParabolicMetricSpec& spec, double r, long n_samples,
                                uint64_t seed);

/// Grid maximal function: max over axis-aligned rectangles with dyadic node
/// counts per side containing the point of the average of |h|.
Field maximal_fn(const Field& h);

/// Grid sharp function: max over space-time cubes (dyadic space side, time
/// extent delta^{2/a} rounded up to the dyadic set) containing the point of
/// the mean oscillation of h. The cube family embeds into the maximal
/// function's rectangle family, so sharp_fn <= 2 maximal_fn pointwise.
Field sharp_fn(const Field& h, double alpha);

struct SharpEstimate {
  Field ratio;                     // 0 where the denominator is floored away
  double fitted_constant = 0.0;    // max ratio
  double fitted_constant_doubled_window = 0.0;  // k = 2 rerun, else 0
};

/// Pointwise ratio sharp(L_k f) / (M |f|^{p0})^{1/p0} with denominator floor
/// 1e-12; the max ratio is the empirical operator constant.
SharpEstimate sharp_estimate_check(const Field& f, double alpha, double p0, int k,
                                   double lag_window,
                                   std::optional<std::pair<int, int>> indices = std::nullopt);

}  // namespace fracdiff
