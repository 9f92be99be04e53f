#pragma once

#include <array>
#include <vector>

#include "fracdiff/field.hpp"

namespace fracdiff {

/// Power weight |x - center|^gamma on R^d (role = space) or |t|^gamma on the
/// half-line (role = time, center fixed at 0).
struct PowerWeight {
  enum class Role { space, time };
  double exponent = 0.0;
  std::array<double, 2> center = {0.0, 0.0};
  int domain_dim = 1;
  Role role = Role::space;

  /// Membership criterion for the Muckenhoupt class at integrability p:
  /// -d < gamma < d (p - 1).
  bool in_class(double p) const {
    return exponent > -domain_dim && exponent < domain_dim * (p - 1.0);
  }
};

PowerWeight space_weight(double gamma, int dim, std::array<double, 2> center = {0.0, 0.0});
PowerWeight time_weight(double gamma);

/// Weight of the dual Lebesgue space: exponent -gamma/(p-1), same center.
PowerWeight dual_weight(const PowerWeight& w, double p);

/// Ball families probed by the characteristic estimate.
struct SamplingSpec {
  std::vector<double> radii;        // log-spaced ball radii
  std::vector<double> off_center;   // center offsets in units of the radius
  int refine_level = 0;             // extends the radius range by 10^level
  double divergence_cap = 1e9;
};

SamplingSpec default_sampling();

struct ApEstimate {
  double value = 1.0;       // largest sampled ball product
  bool diverged = false;
  double divergence_radius = 0.0;  // radius at which the running product blew up
};

/// Empirical Muckenhoupt characteristic: max over sampled balls B_r(x0) of
/// (avg_B w) (avg_B w^{-1/(p-1)})^{p-1}. Ball averages use exact radial
/// integrals in 1-d and radial quadrature in 2-d.
ApEstimate ap_characteristic(const PowerWeight& w, double p,
                             const SamplingSpec& sampling = default_sampling());

/// Mixed-norm specification: L_q(w2 dt; L_p(w1 dx)) up to time horizon T.
struct WeightedNormSpec {
  double p = 2.0;
  double q = 2.0;
  PowerWeight w1;  // space
  PowerWeight w2;  // time
  double horizon = 1.0;
};

/// Weighted mixed norm of a field with cell-averaged weights; exact time and
/// 1-d space cell integrals, Gauss subdivision across singular 2-d cells.
double weighted_norm(const Field& f, const WeightedNormSpec& spec);

/// Unweighted mixed norm via an independent direct accumulation.
double unweighted_norm(const Field& f, double p, double q, double horizon);

}  // namespace fracdiff
