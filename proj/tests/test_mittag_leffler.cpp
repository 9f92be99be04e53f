#include "doctest.h"

#include "fracdiff/mittag_leffler.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>
#include <vector>

using fracdiff::MLQuery;
using fracdiff::ml_batch;
using fracdiff::ml_eval;

TEST_CASE("special cases at z = 0 and elementary alpha") {
  CHECK(ml_eval(1.0, 1.0, -1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
  const double x = M_PI / 2;
  CHECK(std::abs(ml_eval(2.0, 1.0, -x * x) - std::cos(x)) < 1e-12);
  CHECK(ml_eval(0.5, 0.5, 0.0) == doctest::Approx(1.0 / std::tgamma(0.5)).epsilon(1e-14));
}

TEST_CASE("exponential identity across the full z range") {
  for (double z = 0.0; z >= -50.0; z -= 0.7) {
    CHECK(std::abs(ml_eval(1.0, 1.0, z) - std::exp(z)) < 1e-12);
  }
}

TEST_CASE("trigonometric identities E_{2,1} and E_{2,2}") {
  for (double x = 0.1; x <= 7.0; x += 0.3) {
    CHECK(std::abs(ml_eval(2.0, 1.0, -x * x) - std::cos(x)) < 1e-11);
    CHECK(std::abs(ml_eval(2.0, 2.0, -x * x) - std::sin(x) / x) < 1e-11);
  }
}

TEST_CASE("erfc identity for alpha = 1/2") {
  // E_{1/2,1}(z) = e^{z^2} erfc(-z) for z <= 0.
  for (double a = 0.2; a <= 40.0; a *= 1.7) {
    const double expect = oracles::erfcx(a);
    const double got = ml_eval(0.5, 1.0, -a);
    CHECK(std::abs(got - expect) < 1e-11 * std::max(1.0, std::abs(expect)));
  }
}

TEST_CASE("agrees with the extended-precision series oracle") {
  // Covers both the series branch and the integral branch (the oracle stays
  // valid well past the internal switch point).
  const double alphas[] = {0.2, 0.3, 0.5, 0.7, 0.9, 1.0, 1.1, 1.3, 1.5, 1.8, 2.0};
  const double betas[] = {0.3, 0.5, 0.8, 1.0, 1.4, 2.0, 2.7, 3.5, 4.0};
  for (double a : alphas) {
    const double zmax = std::min(60.0, std::pow(60.0, a));
    for (double b : betas) {
      for (double frac : {0.05, 0.2, 0.5, 0.8, 1.0}) {
        const double z = -zmax * frac;
        const double expect = oracles::ml_series_big(a, b, z);
        const double got = ml_eval(a, b, z);
        CAPTURE(a);
        CAPTURE(b);
        CAPTURE(z);
        CHECK(std::abs(got - expect) <= 1e-11 * std::max(1.0, std::abs(expect)));
      }
    }
  }
}

TEST_CASE("oracle pinned value for ml_batch") {
  const double expect = oracles::ml_series_big(0.8, 0.8, -3.0);
  const auto got = ml_batch(0.8, 0.8, {-3.0});
  CHECK(std::abs(got[0] - expect) < 1e-12);
  const double x = 1.0;
  CHECK(ml_batch(2.0, 2.0, {-x * x})[0] == doctest::Approx(0.8414709848078965).epsilon(1e-12));
}

TEST_CASE("recurrence E_{a,b}(z) = z E_{a,a+b}(z) + 1/Gamma(b)") {
  for (double a : {0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0}) {
    for (double b : {0.2, 0.6, 1.0, 1.4, 1.8}) {
      for (double z : {-0.2, -1.0, -4.0, -9.0, -17.0, -33.0, -50.0}) {
        const double lhs = ml_eval(a, b, z);
        const double rhs = z * ml_eval(a, a + b, z) + 1.0 / std::tgamma(b);
        CAPTURE(a);
        CAPTURE(b);
        CAPTURE(z);
        CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(lhs)));
      }
    }
  }
}

TEST_CASE("bounded and monotone tail on the kernel-symbol betas") {
  // Not a theorem; regression guard over the sampled lattice.
  for (double a : {0.3, 0.7, 1.0, 1.5, 1.9}) {
    for (double db : {0.0, 1.0, 2.0}) {
      const double b = a + db;
      if (b > 4.0) continue;
      double prev = std::numeric_limits<double>::infinity();
      for (double z = 0.0; z >= -200.0; z -= 2.5) {
        const double v = ml_eval(a, b, z);
        CHECK(std::isfinite(v));
        CHECK(v >= -1.0);
        CHECK(v <= std::max(1.0, 1.0 / std::tgamma(b)) + 1e-12);
        if (b >= a && a <= 1.0) {
          // complete monotonicity regime
          CHECK(v <= prev + 1e-12);
          prev = v;
        }
      }
    }
  }
}

TEST_CASE("batch matches scalar calls bitwise and reports offending index") {
  std::vector<double> zs;
  for (int i = 0; i < 64; ++i) zs.push_back(-0.37 * i);
  const auto batch = ml_batch(1.3, 1.3, zs);
  for (size_t i = 0; i < zs.size(); ++i) {
    CHECK(batch[i] == ml_eval(1.3, 1.3, zs[i]));
  }
  CHECK_THROWS_WITH_AS(ml_batch(1.0, 1.0, {-1.0, 2.0}), doctest::Contains("element 1"),
                       fracdiff::InputDomainError);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(ml_eval(1.0, 1.0, 0.5), fracdiff::InputDomainError);
  CHECK_THROWS_AS(ml_eval(0.0, 1.0, -1.0), fracdiff::ParameterError);
  CHECK_THROWS_AS(ml_eval(2.5, 1.0, -1.0), fracdiff::ParameterError);
  CHECK_THROWS_AS(ml_eval(1.0, 0.0, -1.0), fracdiff::ParameterError);
  CHECK_THROWS_AS(ml_eval(1.0, 4.5, -1.0), fracdiff::ParameterError);
}

TEST_CASE("series and integral branches agree near the switch point") {
  const fracdiff::MLConfig config;
  for (double a : {0.3, 0.5, 0.8, 1.2, 1.7}) {
    for (double b : {0.5, 1.0, a, a + 1.0}) {
      const double zs = -fracdiff::detail::ml_series_limit(a, config);
      for (double scale : {0.7, 0.9, 1.0}) {
        const double z = zs * scale;  // both branches are valid here
        const double series = fracdiff::detail::ml_series(a, b, z);
        const double integral = fracdiff::detail::ml_large(a, b, z, config);
        CAPTURE(a);
        CAPTURE(b);
        CAPTURE(z);
        CHECK(std::abs(series - integral) < 1e-11 * std::max(1.0, std::abs(series)));
      }
    }
  }
}
