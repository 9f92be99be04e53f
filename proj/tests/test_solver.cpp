#include "doctest.h"

#include "fracdiff/mittag_leffler.hpp"
#include "fracdiff/solver.hpp"

#include <cmath>
#include <random>

using namespace fracdiff;

namespace {

ComplexTimeSeries constant_modes(const TimeGrid& g, std::complex<double> c) {
  ComplexTimeSeries out(g);
  for (auto& v : out.values) v = c;
  return out;
}

// manufactured source for u* = t^2 cos(2 pi x / L)
Field manufactured_source(const TimeGrid& tg, const SpaceGrid& sg, double alpha) {
  const double k = 2.0 * M_PI / sg.box_length;
  const double c = std::tgamma(3.0) / std::tgamma(3.0 - alpha);
  return sample_field_1d(tg, sg, [&](double t, double x) {
    return (c * std::pow(t, 2.0 - alpha) + k * k * t * t) * std::cos(k * x);
  });
}

Field manufactured_exact(const TimeGrid& tg, const SpaceGrid& sg) {
  const double k = 2.0 * M_PI / sg.box_length;
  return sample_field_1d(tg, sg, [&](double t, double x) { return t * t * std::cos(k * x); });
}

double rel_l2_error(const Field& a, const Field& b) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    num += d * d;
    den += b.values[i] * b.values[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("solve_mode closed forms") {
  const TimeGrid grid(1.0, 128);
  for (double alpha : {0.5, 1.0, 1.5}) {
    // lambda = 0: u = t^a / Gamma(a+1), exact for constant sources
    const auto u0 = solve_mode(0.0, constant_modes(grid, {1.0, 0.0}), alpha);
    CHECK(u0[0] == std::complex<double>(0.0, 0.0));
    for (int j = 1; j <= grid.n_steps; ++j) {
      const double t = grid.node(j);
      CHECK(u0[j].real() ==
            doctest::Approx(std::pow(t, alpha) / std::tgamma(alpha + 1.0)).epsilon(1e-12));
      CHECK(u0[j].imag() == 0.0);
    }
    // lambda = 2: u = t^a E_{a,a+1}(-2 t^a)
    const auto u2 = solve_mode(2.0, constant_modes(grid, {1.0, 0.0}), alpha);
    for (int j = 16; j <= grid.n_steps; j += 16) {
      const double t = grid.node(j);
      const double expect = std::pow(t, alpha) * ml_eval(alpha, alpha + 1.0, -2.0 * std::pow(t, alpha));
      CHECK(u2[j].real() == doctest::Approx(expect).epsilon(1e-11));
    }
  }
  // zero source
  const auto uz = solve_mode(3.0, constant_modes(grid, {0.0, 0.0}), 0.7);
  for (const auto& v : uz.values) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("solve_mode piecewise-linear upgrade is exact for linear sources") {
  const TimeGrid grid(1.0, 64);
  ComplexTimeSeries ramp(grid);
  for (int j = 0; j < ramp.size(); ++j) ramp[j] = grid.node(j);
  SolverOptions linear;
  linear.piecewise_linear = true;
  // lambda = 0: I^a t = t^{1+a} / Gamma(a+2)
  for (double alpha : {0.4, 1.3}) {
    const auto u = solve_mode(0.0, ramp, alpha, linear);
    for (int j = 1; j <= grid.n_steps; j += 7) {
      const double t = grid.node(j);
      CHECK(u[j].real() ==
            doctest::Approx(std::pow(t, alpha + 1.0) / std::tgamma(alpha + 2.0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("solve reproduces the manufactured solution") {
  const TimeGrid tg(1.0, 192);
  const SpaceGrid sg(1, 40.0, 64);
  for (double alpha : {0.5, 1.0, 1.5}) {
    const Field f = manufactured_source(tg, sg, alpha);
    const Field u = solve(f, alpha);
    const Field exact = manufactured_exact(tg, sg);
    CAPTURE(alpha);
    CHECK(rel_l2_error(u, exact) < 5e-2);
    for (long s = 0; s < u.n_space(); ++s) CHECK(u.at(0, s) == 0.0);
  }
}

TEST_CASE("manufactured error decreases under time refinement") {
  const SpaceGrid sg(1, 40.0, 32);
  const double alpha = 0.5;
  double prev = -1.0;
  for (int n_steps : {64, 128, 256}) {
    const TimeGrid tg(1.0, n_steps);
    const double err =
        rel_l2_error(solve(manufactured_source(tg, sg, alpha), alpha), manufactured_exact(tg, sg));
    if (prev > 0.0) CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("zero source gives the zero field") {
  const TimeGrid tg(1.0, 32);
  const SpaceGrid sg(1, 20.0, 16);
  const Field u = solve(Field(tg, sg), 0.8);
  for (double v : u.values) CHECK(v == 0.0);
}

TEST_CASE("heat limit matches the classical Duhamel modes") {
  // alpha = 1, time-independent g: uhat = (1 - e^{-lambda t}) ghat / lambda
  const TimeGrid tg(1.0, 256);
  const SpaceGrid sg(1, 20.0, 32);
  const Field f = sample_field_1d(tg, sg, [&](double, double x) {
    return std::cos(2.0 * M_PI * x / sg.box_length) + 0.5 * std::sin(4.0 * M_PI * x / sg.box_length);
  });
  const Field u = solve(f, 1.0);
  // check against the closed form at a few nodes via direct mode sums
  const double k1 = 2.0 * M_PI / sg.box_length;
  const double k2 = 4.0 * M_PI / sg.box_length;
  for (int j : {64, 128, 256}) {
    const double t = tg.node(j);
    for (int i : {3, 11, 23}) {
      const double x = sg.node(i);
      const double expect = (1.0 - std::exp(-k1 * k1 * t)) / (k1 * k1) * std::cos(k1 * x) +
                            0.5 * (1.0 - std::exp(-k2 * k2 * t)) / (k2 * k2) * std::sin(k2 * x);
      CHECK(u.at(j, i) == doctest::Approx(expect).epsilon(2e-4));
    }
  }
}

TEST_CASE("solve is linear in the source") {
  const TimeGrid tg(1.0, 48);
  const SpaceGrid sg(1, 20.0, 16);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> dist;
  Field f1(tg, sg), f2(tg, sg);
  for (auto& v : f1.values) v = dist(rng);
  for (auto& v : f2.values) v = dist(rng);
  Field combo(tg, sg);
  for (size_t i = 0; i < combo.values.size(); ++i)
    combo.values[i] = 2.0 * f1.values[i] - 0.7 * f2.values[i];
  const double alpha = 1.2;
  const Field u1 = solve(f1, alpha), u2 = solve(f2, alpha), uc = solve(combo, alpha);
  double scale = uc.max_abs();
  for (size_t i = 0; i < uc.values.size(); ++i) {
    CHECK(std::abs(uc.values[i] - (2.0 * u1.values[i] - 0.7 * u2.values[i])) <
          1e-12 * std::max(1.0, scale));
  }
}

TEST_CASE("second-derivative operator commutes with the spectral derivative") {
  const TimeGrid tg(1.0, 48);
  const SpaceGrid sg(1, 20.0, 32);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> dist;
  Field f(tg, sg);
  for (auto& v : f.values) v = dist(rng);
  const double alpha = 0.6;
  const Field via_L2 = apply_L(2, f, alpha, tg.t_end, std::make_pair(0, 0));
  const Field via_dd = spectral_second_derivative(apply_L(0, f, alpha, tg.t_end), 0, 0);
  const double scale = via_L2.max_abs();
  for (size_t i = 0; i < via_L2.values.size(); ++i)
    CHECK(std::abs(via_L2.values[i] - via_dd.values[i]) < 1e-11 * scale);
}

TEST_CASE("operator family edge cases") {
  const TimeGrid tg(1.0, 32);
  const SpaceGrid sg(1, 20.0, 16);
  // zero source
  const Field z = apply_L(0, Field(tg, sg), 0.8, 1.0);
  for (double v : z.values) CHECK(v == 0.0);
  // gradient of an even source vanishes on the symmetry axis x = 0
  const Field even = sample_field_1d(tg, sg, [&](double t, double x) {
    return (1.0 + t) * std::cos(2.0 * M_PI * x / sg.box_length);
  });
  const Field g = apply_L(1, even, 0.8, tg.t_end, std::make_pair(0, 0));
  const int center = sg.n_points / 2;  // node at x = 0
  for (int t = 0; t < tg.n_nodes(); ++t)
    CHECK(std::abs(g.at(t, center)) < 1e-12 * std::max(1.0, g.max_abs()));
  // missing indices
  CHECK_THROWS_AS(apply_L(1, even, 0.8, 1.0), ParameterError);
  CHECK_THROWS_AS(apply_L(2, even, 0.8, 1.0), ParameterError);
}

TEST_CASE("time-shift covariance on zero-extended sources") {
  const TimeGrid tg(1.0, 40);
  const SpaceGrid sg(1, 20.0, 16);
  Field f(tg, sg);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> dist;
  for (int t = 1; t < tg.n_nodes(); ++t)  // f(0,.) = 0
    for (long s = 0; s < f.n_space(); ++s) f.at(t, s) = dist(rng);
  Field shifted(tg, sg);
  for (int t = 1; t < tg.n_nodes(); ++t)
    for (long s = 0; s < f.n_space(); ++s) shifted.at(t, s) = f.at(t - 1, s);

  const double alpha = 1.4;
  const Field Lf = apply_L(0, f, alpha, tg.t_end);
  const Field Lshift = apply_L(0, shifted, alpha, tg.t_end);
  for (int t = 1; t < tg.n_nodes(); ++t)
    for (long s = 0; s < f.n_space(); ++s) CHECK(Lshift.at(t, s) == Lf.at(t - 1, s));
}

TEST_CASE("lag window truncation") {
  const TimeGrid tg(1.0, 64);
  const SpaceGrid sg(1, 20.0, 16);
  Field f(tg, sg);
  // source concentrated in the first quarter of the time axis
  for (int t = 1; t <= tg.n_steps / 4; ++t)
    for (long s = 0; s < f.n_space(); ++s)
      f.at(t, s) = std::sin(2.0 * M_PI * sg.node(s) / sg.box_length);
  const double alpha = 0.7;
  const Field full = apply_L(0, f, alpha, tg.t_end);
  const Field cut = apply_L(0, f, alpha, 0.25);
  // with a short window late outputs lose the early-source contribution
  double tail_full = 0.0, tail_cut = 0.0;
  for (long s = 0; s < f.n_space(); ++s) {
    tail_full = std::max(tail_full, std::abs(full.at(tg.n_steps, s)));
    tail_cut = std::max(tail_cut, std::abs(cut.at(tg.n_steps, s)));
  }
  CHECK(tail_cut < 0.5 * tail_full);
  // while the window covers everything the fields agree
  for (int t = 0; t <= tg.n_steps / 4; ++t)
    for (long s = 0; s < f.n_space(); ++s) CHECK(cut.at(t, s) == full.at(t, s));
}

TEST_CASE("residual and weak-form checks on the manufactured pair") {
  const TimeGrid tg(1.0, 256);
  const SpaceGrid sg(1, 40.0, 64);
  const double alpha = 0.5;
  const Field f = manufactured_source(tg, sg, alpha);
  const Field u = solve(f, alpha);
  const auto report = residual_and_weakform_check(u, f, alpha);
  CHECK(report.equation_residual < 5e-2);
  CHECK(report.weak_form_residual < 5e-2);

  // trivial pair
  const auto zero = residual_and_weakform_check(Field(tg, sg), Field(tg, sg), alpha);
  CHECK(zero.equation_residual == 0.0);
  CHECK(zero.weak_form_residual == 0.0);
}

TEST_CASE("residual on the exact field decreases under time refinement") {
  const SpaceGrid sg(1, 40.0, 32);
  const double alpha = 1.5;
  double prev = -1.0;
  for (int n_steps : {64, 128, 256}) {
    const TimeGrid tg(1.0, n_steps);
    const auto report = residual_and_weakform_check(manufactured_exact(tg, sg),
                                                    manufactured_source(tg, sg, alpha), alpha);
    if (prev > 0.0) CHECK(report.equation_residual < prev);
    prev = report.equation_residual;
  }
}

TEST_CASE("initial data vanishes for alpha above one under refinement") {
  const SpaceGrid sg(1, 40.0, 32);
  const double alpha = 1.5;
  double prev = 1e30;
  for (int n_steps : {32, 64, 128}) {
    const TimeGrid tg(1.0, n_steps);
    const Field u = solve(manufactured_source(tg, sg, alpha), alpha);
    double d0 = 0.0;
    for (long s = 0; s < u.n_space(); ++s)
      d0 = std::max(d0, std::abs(u.at(1, s) - u.at(0, s)) / tg.dt());
    CHECK(d0 < prev);
    prev = d0;
  }
}
