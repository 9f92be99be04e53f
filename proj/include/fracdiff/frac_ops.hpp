#pragma once

#include "fracdiff/time_series.hpp"

namespace fracdiff {

/// Discrete fractional calculus on uniform time grids. All operators treat the
/// input as piecewise linear between nodes and integrate the weakly singular
/// kernel moments exactly, so the convolution weights depend on the lag only.

/// (1/Gamma(a)) int_0^t (t-s)^{a-1} phi(s) ds at every node; node 0 is 0 exactly.
/// Requires alpha in (0,2]. alpha == 0 is accepted and returns phi (identity).
TimeSeries rl_integral(const TimeSeries& phi, double alpha);
ComplexTimeSeries rl_integral(const ComplexTimeSeries& phi, double alpha);

/// d^n/dt^n of rl_integral(phi, n - alpha) with n = 1 for alpha in (0,1],
/// n = 2 for alpha in (1,2). Interior stencils are centered, endpoints use
/// one-sided stencils of the same formal order.
TimeSeries rl_derivative(const TimeSeries& phi, double alpha);

/// rl_derivative applied to phi(t) - phi(0) - 1_{alpha>1} phi'(0) t, with
/// phi'(0) from a 3-point one-sided stencil.
TimeSeries caputo_derivative(const TimeSeries& phi, double alpha);

struct IdentityReport {
  double semigroup_error = 0.0;    // I^a I^b phi vs I^{a+b} phi
  double inversion_error = 0.0;    // I^a d^a phi vs phi
  double equivalence_error = 0.0;  // phi - head vs I^a d^a phi
  bool head_violation = false;     // phi(0) (and phi'(0) for alpha > 1) not ~ 0
  double max_error() const {
    return std::max(semigroup_error, std::max(inversion_error, equivalence_error));
  }
};

/// Max-norm relative errors of the composition, inversion and head-subtracted
/// equivalence identities. Requires alpha, beta in (0,2) with alpha+beta <= 2.
IdentityReport verify_calculus_identities(const TimeSeries& phi, double alpha, double beta);

}  // namespace fracdiff
