#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sast/model.hpp"

using namespace sast;

TEST_CASE("null_density matches the closed-form Gaussian pdf") {
  CHECK(null_density(0.0, NullParams{0.0, 1.0}) ==
        doctest::Approx(0.3989422804014327).epsilon(1e-12));
  CHECK(null_density(2.0, NullParams{0.0, 1.0}) ==
        doctest::Approx(oracle::gauss_pdf(2.0, 0.0, 1.0)).epsilon(1e-12));
  CHECK(null_density(2.0, NullParams{0.0, 1.0}) ==
        doctest::Approx(0.05399).epsilon(1e-4));
  // Empirical null from the anomaly-detection application.
  const NullParams empirical{0.028, 0.618};
  CHECK(null_density(0.028, empirical) ==
        doctest::Approx(1.0 / (0.618 * std::sqrt(2.0 * M_PI))).epsilon(1e-12));
  CHECK(null_density(0.028, empirical) == doctest::Approx(0.6455).epsilon(1e-4));

  CHECK(null_density(1000.0, NullParams{}) > 0.0);  // floored, never zero
  CHECK_THROWS_AS(null_density(std::nan(""), NullParams{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(null_density(0.0, NullParams{0.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(null_density(0.0, NullParams{0.0, -1.0}),
                  std::invalid_argument);
}

TEST_CASE("clfdr_oracle reproduces direct density arithmetic") {
  const NullParams null{0.0, 1.0};
  const AltParams alt{2.0, 1.0};

  CHECK(clfdr_oracle(3.7, 0.0, null, alt).value == 1.0);
  CHECK(clfdr_oracle(-1.2, 0.0, null, alt).value == 1.0);
  CHECK(clfdr_oracle(0.4, 1.0, null, alt).value == 0.0);

  CHECK(clfdr_oracle(0.0, 0.5, null, alt).value ==
        doctest::Approx(oracle::clfdr(0.0, 0.5, 2.0)).epsilon(1e-12));
  CHECK(clfdr_oracle(0.0, 0.5, null, alt).value ==
        doctest::Approx(0.8808).epsilon(1e-4));
  CHECK(clfdr_oracle(2.0, 0.5, null, alt).value ==
        doctest::Approx(0.1192).epsilon(1e-4));
  // The two example points are mirror images around x = mu/2.
  CHECK(clfdr_oracle(0.0, 0.5, null, alt).value +
            clfdr_oracle(2.0, 0.5, null, alt).value ==
        doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(clfdr_oracle(0.0, -0.1, null, alt), std::invalid_argument);
  CHECK_THROWS_AS(clfdr_oracle(0.0, 1.1, null, alt), std::invalid_argument);
}

TEST_CASE("clfdr_oracle stays in [0,1] and decreases on the right tail") {
  const NullParams null{0.0, 1.0};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-8.0, 8.0);
  std::uniform_real_distribution<double> upi(0.0, 1.0);
  std::uniform_real_distribution<double> umu(0.5, 4.0);
  for (int i = 0; i < 2000; ++i) {
    const double v =
        clfdr_oracle(ux(rng), upi(rng), null, AltParams{umu(rng), 1.0}).value;
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }

  // Monotone non-increasing in x for x >= mu when the alt mean exceeds the
  // null mean, checked pointwise on 100 grid points.
  const double mu = 2.5;
  double prev = clfdr_oracle(mu, 0.3, null, AltParams{mu, 1.0}).value;
  for (int i = 1; i < 100; ++i) {
    const double x = mu + 0.06 * i;
    const double cur = clfdr_oracle(x, 0.3, null, AltParams{mu, 1.0}).value;
    CHECK(cur <= prev + 1e-14);
    prev = cur;
  }
}

TEST_CASE("clfdr_oracle accepts an arbitrary alternative density") {
  const NullParams null{0.0, 1.0};
  const auto uniform_alt = [](double x) {
    return (x >= -1.0 && x <= 1.0) ? 0.5 : 0.0;
  };
  const double f0 = oracle::gauss_pdf(0.0, 0.0, 1.0);
  const double expect = 0.5 * f0 / (0.5 * f0 + 0.5 * 0.5);
  CHECK(clfdr_oracle(0.0, 0.5, null, uniform_alt).value ==
        doctest::Approx(expect).epsilon(1e-12));
  // Outside the support of the alternative the density floor keeps the
  // ratio defined; certainly null.
  CHECK(clfdr_oracle(3.0, 0.5, null, uniform_alt).value ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("z_to_pvalue matches normal tail areas") {
  const NullParams std_null{0.0, 1.0};
  CHECK(z_to_pvalue(0.0, std_null) == 1.0);
  CHECK(z_to_pvalue(1.96, std_null) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(z_to_pvalue(1.96, std_null) ==
        doctest::Approx(2.0 * oracle::gauss_cdf(-1.96)).epsilon(1e-12));
  CHECK(z_to_pvalue(-1.96, std_null) ==
        doctest::Approx(z_to_pvalue(1.96, std_null)).epsilon(1e-12));

  const NullParams empirical{0.028, 0.618};
  CHECK(z_to_pvalue(0.028 + 1.96 * 0.618, empirical) ==
        doctest::Approx(2.0 * oracle::gauss_cdf(-1.96)).epsilon(1e-12));
  CHECK(z_to_pvalue(0.028 + 1.96 * 0.618, empirical) ==
        doctest::Approx(0.05).epsilon(1e-3));

  CHECK(z_to_pvalue(100.0, std_null) > 0.0);  // floored into (0, 1]
  CHECK_THROWS_AS(z_to_pvalue(std::nan(""), std_null), std::invalid_argument);
}

TEST_CASE("p_to_z_randomized inverts z_to_pvalue") {
  CHECK(p_to_z_randomized(1.0, false) == 0.0);
  CHECK(p_to_z_randomized(1.0, true) == 0.0);

  CHECK(p_to_z_randomized(0.05, true) ==
        doctest::Approx(1.959963984540054).epsilon(1e-9));
  CHECK(p_to_z_randomized(0.05, false) ==
        doctest::Approx(-1.959963984540054).epsilon(1e-9));
  CHECK(p_to_z_randomized(0.05, true) ==
        doctest::Approx(-p_to_z_randomized(0.05, false)).epsilon(1e-15));

  const NullParams std_null{0.0, 1.0};
  for (double p : {0.9, 0.5, 0.05, 1e-6}) {
    for (bool coin : {false, true}) {
      const double z = p_to_z_randomized(p, coin);
      CHECK(std::abs(z_to_pvalue(z, std_null) - p) <= 1e-10);
    }
  }

  CHECK_THROWS_AS(p_to_z_randomized(0.0, true), std::invalid_argument);
  CHECK_THROWS_AS(p_to_z_randomized(-0.2, true), std::invalid_argument);
  CHECK_THROWS_AS(p_to_z_randomized(1.5, true), std::invalid_argument);
}

TEST_CASE("normal_quantile agrees with erfc-based cdf") {
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(0.975) ==
        doctest::Approx(1.959963984540054).epsilon(1e-12));
  for (double p : {1e-10, 1e-6, 0.01, 0.2, 0.5, 0.77, 0.999, 1.0 - 1e-9}) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
  }
  CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
}
