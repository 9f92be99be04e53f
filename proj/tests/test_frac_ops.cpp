#include "doctest.h"

#include "fracdiff/frac_ops.hpp"

#include <cmath>
#include <random>

using namespace fracdiff;

namespace {
TimeSeries constant_series(const TimeGrid& g, double c) {
  return sample_time_series(g, [c](double) { return c; });
}
}  // namespace

TEST_CASE("rl_integral of order 1 is the running integral") {
  const TimeGrid grid(2.0, 64);
  const auto out = rl_integral(constant_series(grid, 1.0), 1.0);
  for (int j = 0; j <= grid.n_steps; ++j) {
    CHECK(out[j] == doctest::Approx(grid.node(j)).epsilon(1e-14));
  }
  CHECK(out[0] == 0.0);
}

TEST_CASE("rl_integral closed form for constants and half order") {
  const TimeGrid grid(1.0, 128);
  const auto out = rl_integral(constant_series(grid, 1.0), 0.5);
  // I^a 1 = t^a / Gamma(a+1); exact for piecewise-linear quadrature
  CHECK(out[grid.n_steps] == doctest::Approx(1.0 / std::tgamma(1.5)).epsilon(1e-13));
  CHECK(out[grid.n_steps / 2] ==
        doctest::Approx(std::pow(0.5, 0.5) / std::tgamma(1.5)).epsilon(1e-13));
}

TEST_CASE("composition of fractional integrals") {
  const TimeGrid grid(1.5, 1024);
  const auto phi = sample_time_series(grid, [](double t) { return std::sin(t) + 0.3 * t; });
  const auto twice = rl_integral(rl_integral(phi, 0.3), 0.7);
  const auto once = rl_integral(phi, 1.0);
  double err = 0.0, scale = 0.0;
  for (int j = 0; j < phi.size(); ++j) {
    err = std::max(err, std::abs(twice[j] - once[j]));
    scale = std::max(scale, std::abs(once[j]));
  }
  CHECK(err / scale < 2e-5);
}

TEST_CASE("rl_derivative classical limit and power rule") {
  const TimeGrid grid(1.0, 512);
  const auto sq = sample_time_series(grid, [](double t) { return t * t; });
  const auto d1 = rl_derivative(sq, 1.0);
  for (int j = 0; j <= grid.n_steps; ++j) {
    CHECK(d1[j] == doctest::Approx(2.0 * grid.node(j)).epsilon(1e-10));
  }

  for (double alpha : {0.3, 0.5, 0.8}) {
    const auto pw = sample_time_series(grid, [alpha](double t) { return std::pow(t, alpha); });
    const auto d = rl_derivative(pw, alpha);
    const double expect = std::tgamma(alpha + 1.0);
    // interior nodes; the t=0 stencil sees the unbounded derivative of t^alpha
    for (int j = grid.n_steps / 8; j <= grid.n_steps; j += 16) {
      CHECK(d[j] == doctest::Approx(expect).epsilon(2e-3));
    }
  }
}

TEST_CASE("derivative inverts the integral") {
  // phi(0) = phi'(0) = 0 keeps the initial layer of I^a phi differentiable.
  const TimeGrid grid(2.0, 2048);
  const auto phi =
      sample_time_series(grid, [](double t) { return t * t * (std::cos(3 * t) + 1.0); });
  for (double alpha : {0.4, 1.3}) {
    const auto recon = rl_derivative(rl_integral(phi, alpha), alpha);
    double err = 0.0;
    for (int j = 0; j < phi.size(); ++j) err = std::max(err, std::abs(recon[j] - phi[j]));
    CAPTURE(alpha);
    CHECK(err < 5e-3);
  }
}

TEST_CASE("caputo annihilates the Taylor head") {
  const TimeGrid grid(1.0, 64);
  const auto c = constant_series(grid, 4.2);
  for (double alpha : {0.5, 1.5}) {
    const auto d = caputo_derivative(c, alpha);
    for (double v : d.values) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
  }
  // for alpha > 1 the head phi(0) + t phi'(0) equals phi when phi is linear
  const auto lin = sample_time_series(grid, [](double t) { return 2.0 - 3.0 * t; });
  const auto d = caputo_derivative(lin, 1.5);
  for (double v : d.values) CHECK(std::abs(v) < 1e-10);
}

TEST_CASE("caputo of t at half order") {
  const TimeGrid grid(1.0, 1024);
  const auto lin = sample_time_series(grid, [](double t) { return t; });
  const auto d = caputo_derivative(lin, 0.5);
  // d^a t = t^{1-a}/Gamma(2-a)
  CHECK(d[grid.n_steps] == doctest::Approx(1.0 / std::tgamma(1.5)).epsilon(1e-6));
  CHECK(d[grid.n_steps / 4] ==
        doctest::Approx(std::pow(0.25, 0.5) / std::tgamma(1.5)).epsilon(1e-5));
}

TEST_CASE("caputo equals rl_derivative for vanishing sampled heads") {
  const TimeGrid grid(1.0, 256);
  // below 1: only phi(0) enters the head
  const auto cubic = sample_time_series(grid, [](double t) { return t * t * (1.0 + t); });
  {
    const auto a = caputo_derivative(cubic, 0.7);
    const auto b = rl_derivative(cubic, 0.7);
    for (int j = 0; j < cubic.size(); ++j) CHECK(a[j] == b[j]);
  }
  // above 1: the 3-point stencil for phi'(0) is exact up to quadratics
  const auto quad = sample_time_series(grid, [](double t) { return 3.0 * t * t; });
  {
    const auto a = caputo_derivative(quad, 1.6);
    const auto b = rl_derivative(quad, 1.6);
    for (int j = 0; j < quad.size(); ++j) CHECK(a[j] == b[j]);
  }
}

TEST_CASE("linearity to machine precision") {
  const TimeGrid grid(1.0, 128);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> dist;
  TimeSeries u(grid), v(grid);
  for (int j = 0; j < u.size(); ++j) {
    u[j] = dist(rng);
    v[j] = dist(rng);
  }
  const double a = 1.7, b = -0.4;
  TimeSeries combo(grid);
  for (int j = 0; j < u.size(); ++j) combo[j] = a * u[j] + b * v[j];

  for (double alpha : {0.5, 1.2}) {
    const auto op_combo = rl_integral(combo, alpha);
    const auto op_u = rl_integral(u, alpha);
    const auto op_v = rl_integral(v, alpha);
    double scale = 0.0;
    for (double w : op_combo.values) scale = std::max(scale, std::abs(w));
    for (int j = 0; j < u.size(); ++j) {
      CHECK(std::abs(op_combo[j] - (a * op_u[j] + b * op_v[j])) < 1e-13 * std::max(1.0, scale));
    }
  }
}

TEST_CASE("identity report for smooth input") {
  const TimeGrid grid(2.0, 4096);
  const auto phi = sample_time_series(grid, [](double t) { return t * t * std::sin(t); });
  const auto report = verify_calculus_identities(phi, 0.5, 0.5);
  CHECK(!report.head_violation);
  CHECK(report.semigroup_error <= 1e-3);
  CHECK(report.inversion_error <= 1e-3);
  CHECK(report.equivalence_error <= 1e-3);
}

TEST_CASE("identity report is exactly zero on the zero input") {
  const TimeGrid grid(1.0, 64);
  const auto report = verify_calculus_identities(constant_series(grid, 0.0), 0.5, 0.5);
  CHECK(report.semigroup_error == 0.0);
  CHECK(report.inversion_error == 0.0);
  CHECK(report.equivalence_error == 0.0);
}

TEST_CASE("identity report for a cubic with order above one") {
  const TimeGrid grid(1.0, 4096);
  const auto phi = sample_time_series(grid, [](double t) { return t * t * t; });
  const auto report = verify_calculus_identities(phi, 1.2, 0.3);
  CHECK(!report.head_violation);
  CHECK(report.max_error() <= 1e-3);
}

TEST_CASE("head violation is flagged, not thrown") {
  const TimeGrid grid(1.0, 64);
  const auto report = verify_calculus_identities(constant_series(grid, 1.0), 0.5, 0.5);
  CHECK(report.head_violation);
}

TEST_CASE("halving dt improves the identity errors by 1.5x or better") {
  const auto phi_fn = [](double t) { return t * t * std::sin(t); };
  for (double alpha : {0.3, 0.7, 1.2}) {
    const auto coarse =
        verify_calculus_identities(sample_time_series(TimeGrid(2.0, 512), phi_fn), alpha, 0.5);
    const auto fine =
        verify_calculus_identities(sample_time_series(TimeGrid(2.0, 1024), phi_fn), alpha, 0.5);
    CAPTURE(alpha);
    CHECK(fine.semigroup_error * 1.5 <= coarse.semigroup_error);
    CHECK(fine.inversion_error * 1.5 <= coarse.inversion_error);
    CHECK(fine.equivalence_error * 1.5 <= coarse.equivalence_error);
  }
}

TEST_CASE("time rescaling relation for the caputo derivative") {
  // d^a_t (h(c t)) = c^a (d^a h)(c t), discretized on matching grids.
  const double c = 2.0;
  const int n = 1024;
  const auto h = [](double t) { return std::pow(t, 2.5) + t * t; };
  const TimeGrid fast(1.0, n);
  const TimeGrid slow(c * 1.0, n);
  for (double alpha : {0.6, 1.4}) {
    const auto lhs = caputo_derivative(
        sample_time_series(fast, [&](double t) { return h(c * t); }), alpha);
    const auto rhs = caputo_derivative(sample_time_series(slow, h), alpha);
    double err = 0.0, scale = 0.0;
    for (int j = n / 8; j <= n; ++j) {
      err = std::max(err, std::abs(lhs[j] - std::pow(c, alpha) * rhs[j]));
      scale = std::max(scale, std::abs(lhs[j]));
    }
    CAPTURE(alpha);
    CHECK(err / scale < 2e-3);
  }
}

TEST_CASE("errors on bad input") {
  const TimeGrid tiny(1.0, 2);
  CHECK_THROWS_AS(rl_derivative(constant_series(tiny, 1.0), 0.5), GridError);
  const TimeGrid grid(1.0, 16);
  TimeSeries bad(grid);
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(rl_integral(bad, 0.5), InputDomainError);
  CHECK_THROWS_AS(rl_integral(constant_series(grid, 1.0), 2.5), ParameterError);
  CHECK_THROWS_AS(rl_derivative(constant_series(grid, 1.0), 2.0), ParameterError);
}
