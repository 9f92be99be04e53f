#include "fracdiff/frac_ops.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace fracdiff {

namespace {

// b^p - a^p for 0 <= a < b, without cancellation for a close to b.
double pow_diff(double a, double b, double p) {
  if (a == 0.0) return std::pow(b, p);
  return std::pow(a, p) * std::expm1(p * std::log1p((b - a) / a));
}

// Lag weights of the piecewise-linear product rule: the contribution of the
// interval at lag l (tau in [(l-1) dt, l dt]) is left[l]*phi_L + right[l]*phi_R.
struct ConvolutionWeights {
  std::vector<double> left;
  std::vector<double> right;
};

ConvolutionWeights pl_weights(double alpha, double dt, int n_steps) {
  ConvolutionWeights w;
  w.left.resize(n_steps + 1, 0.0);
  w.right.resize(n_steps + 1, 0.0);
  const double inv_gamma = 1.0 / std::tgamma(alpha);
  for (int l = 1; l <= n_steps; ++l) {
    const double a = (l - 1) * dt;
    const double b = l * dt;
    const double m0 = pow_diff(a, b, alpha) / alpha;
    const double m1 = pow_diff(a, b, alpha + 1.0) / (alpha + 1.0);
    const double lin = (m1 - a * m0) / dt;
    w.left[l] = inv_gamma * lin;
    w.right[l] = inv_gamma * (m0 - lin);
  }
  return w;
}

template <typename T>
BasicTimeSeries<T> rl_integral_impl(const BasicTimeSeries<T>& phi, double alpha) {
  const int n = phi.grid.n_steps;
  const auto w = pl_weights(alpha, phi.grid.dt(), n);
  BasicTimeSeries<T> out(phi.grid);
  out[0] = T{};
  for (int i = 1; i <= n; ++i) {
    T acc{};
    for (int l = 1; l <= i; ++l) {
      acc += w.left[l] * phi[i - l] + w.right[l] * phi[i - l + 1];
    }
    out[i] = acc;
  }
  return out;
}

int derivative_order(double alpha) { return alpha <= 1.0 ? 1 : 2; }

// Finite differences with one-sided second-order endpoint stencils.
TimeSeries diff_n(const TimeSeries& g, int n) {
  const int N = g.grid.n_steps;
  const double dt = g.grid.dt();
  TimeSeries out(g.grid);
  if (n == 1) {
    out[0] = (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * dt);
    for (int i = 1; i < N; ++i) out[i] = (g[i + 1] - g[i - 1]) / (2.0 * dt);
    out[N] = (3.0 * g[N] - 4.0 * g[N - 1] + g[N - 2]) / (2.0 * dt);
  } else {
    const double dt2 = dt * dt;
    out[0] = (2.0 * g[0] - 5.0 * g[1] + 4.0 * g[2] - g[3]) / dt2;
    for (int i = 1; i < N; ++i) out[i] = (g[i + 1] - 2.0 * g[i] + g[i - 1]) / dt2;
    out[N] = (2.0 * g[N] - 5.0 * g[N - 1] + 4.0 * g[N - 2] - g[N - 3]) / dt2;
  }
  return out;
}

double max_abs(const TimeSeries& s) {
  double m = 0.0;
  for (double v : s.values) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const TimeSeries& a, const TimeSeries& b) {
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void check_order_02(double alpha, const char* who) {
  if (!(alpha >= 0.0) || !(alpha <= 2.0) || !std::isfinite(alpha))
    throw ParameterError(std::string(who) + ": order must lie in (0,2], got " +
                         std::to_string(alpha));
}

}  // namespace

TimeSeries rl_integral(const TimeSeries& phi, double alpha) {
  check_order_02(alpha, "rl_integral");
  require_finite(phi, "rl_integral");
  if (alpha == 0.0) return phi;
  return rl_integral_impl(phi, alpha);
}

ComplexTimeSeries rl_integral(const ComplexTimeSeries& phi, double alpha) {
  check_order_02(alpha, "rl_integral");
  require_finite(phi, "rl_integral");
  if (alpha == 0.0) return phi;
  return rl_integral_impl(phi, alpha);
}

TimeSeries rl_derivative(const TimeSeries& phi, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 2.0) || !std::isfinite(alpha))
    throw ParameterError("rl_derivative: order must lie in (0,2), got " + std::to_string(alpha));
  require_finite(phi, "rl_derivative");
  if (phi.grid.n_steps < 4)
    throw GridError("rl_derivative: need n_steps >= 4 for the difference stencils");
  const int n = derivative_order(alpha);
  const double residual_order = n - alpha;
  const TimeSeries g = residual_order == 0.0 ? phi : rl_integral_impl(phi, residual_order);
  return diff_n(g, n);
}

TimeSeries caputo_derivative(const TimeSeries& phi, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 2.0) || !std::isfinite(alpha))
    throw ParameterError("caputo_derivative: order must lie in (0,2)");
  require_finite(phi, "caputo_derivative");
  if (phi.grid.n_steps < 4)
    throw GridError("caputo_derivative: need n_steps >= 4 for the difference stencils");

  const double head0 = phi[0];
  double head1 = 0.0;
  if (alpha > 1.0) {
    head1 = (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * phi.grid.dt());
  }
  TimeSeries shifted(phi.grid);
  for (int j = 0; j < phi.size(); ++j)
    shifted[j] = phi[j] - head0 - head1 * phi.grid.node(j);
  return rl_derivative(shifted, alpha);
}

IdentityReport verify_calculus_identities(const TimeSeries& phi, double alpha, double beta) {
  if (!(alpha > 0.0) || !(alpha < 2.0) || !(beta > 0.0) || !(beta < 2.0) ||
      !(alpha + beta <= 2.0))
    throw ParameterError(
        "verify_calculus_identities: need alpha, beta in (0,2) with alpha + beta <= 2");
  require_finite(phi, "verify_calculus_identities");

  IdentityReport report;
  const double scale = max_abs(phi);
  const double head_tol = 1e-10 * std::max(1.0, scale);
  if (std::abs(phi[0]) > head_tol) report.head_violation = true;
  if (alpha > 1.0) {
    const double d0 = (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * phi.grid.dt());
    if (std::abs(d0) > 1e-6 * std::max(1.0, scale / phi.grid.t_end)) report.head_violation = true;
  }

  const TimeSeries lhs_a = rl_integral(rl_integral(phi, beta), alpha);
  const TimeSeries rhs_a = rl_integral(phi, alpha + beta);
  report.semigroup_error = max_abs_diff(lhs_a, rhs_a) / std::max(max_abs(rhs_a), 1e-300);

  const TimeSeries d_phi = caputo_derivative(phi, alpha);
  const TimeSeries recon = rl_integral(d_phi, alpha);
  report.inversion_error = max_abs_diff(recon, phi) / std::max(scale, 1e-300);

  const double head0 = phi[0];
  const double head1 =
      alpha > 1.0 ? (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * phi.grid.dt()) : 0.0;
  TimeSeries lhs_c(phi.grid);
  for (int j = 0; j < phi.size(); ++j)
    lhs_c[j] = phi[j] - head0 - head1 * phi.grid.node(j);
  report.equivalence_error = max_abs_diff(lhs_c, recon) / std::max(max_abs(lhs_c), 1e-300);
  return report;
}

}  // namespace fracdiff
