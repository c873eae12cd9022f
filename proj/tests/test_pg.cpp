#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "lngp/pg.hpp"

using namespace lngp;

TEST_CASE("analytic moments and their series limits") {
  // b/(2c) tanh(c/2) evaluated away from zero.
  CHECK(pg_mean(1.0, 2.0) ==
        doctest::Approx(std::tanh(1.0) / 4.0).epsilon(1e-12));
  CHECK(pg_mean(3.0, 2.0) == doctest::Approx(3.0 * pg_mean(1.0, 2.0)));
  // The c -> 0 limit is b/4 and must be continuous through the series
  // branch.
  CHECK(pg_mean(1.0, 0.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(pg_mean(1.0, 1e-6) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(pg_mean(1.0, 1e-3) == doctest::Approx(pg_mean(1.0, 1.0001e-3))
                                  .epsilon(1e-6));
  // Symmetry in c.
  CHECK(pg_mean(2.0, -3.0) == pg_mean(2.0, 3.0));
  CHECK(pg_var(2.0, -3.0) == pg_var(2.0, 3.0));
  // Variance limit b/24 at c = 0.
  CHECK(pg_var(1.0, 0.0) == doctest::Approx(1.0 / 24.0).epsilon(1e-12));
  CHECK(pg_var(1.0, 1e-7) == doctest::Approx(1.0 / 24.0).epsilon(1e-9));
  const double c = 2.0;
  const double direct = (std::sinh(c) - c) / (4.0 * c * c * c) /
                        (std::cosh(c / 2.0) * std::cosh(c / 2.0));
  CHECK(pg_var(1.0, c) == doctest::Approx(direct).epsilon(1e-12));

  CHECK_THROWS_AS(pg_mean(0.0, 1.0), Error);
  CHECK_THROWS_AS(pg_var(-1.0, 1.0), Error);
}

TEST_CASE("sampler moments match analytic values") {
  RngStream rng(97);
  const int n = 30000;
  for (double b : {1.0, 3.0}) {
    for (double c : {0.0, 1.5, 6.0, -4.0}) {
      std::vector<double> x(n);
      for (int i = 0; i < n; ++i) x[i] = pg_sample(b, c, rng);
      const double m = testutil::mean_of(x);
      const double v = testutil::var_of(x);
      CHECK(std::abs(m - pg_mean(b, c)) < 5.0 * testutil::se_mean(x));
      CHECK(std::abs(v - pg_var(b, c)) < 5.0 * testutil::se_var(x));
      for (double d : x) REQUIRE(d > 0.0);
    }
  }
  // Large tilts collapse toward zero without hanging or going negative.
  for (double c : {60.0, -150.0, 400.0}) {
    double acc = 0.0;
    for (int i = 0; i < 2000; ++i) acc += pg_sample(1.0, c, rng);
    CHECK(std::abs(acc / 2000.0 - pg_mean(1.0, c)) < 0.1 * pg_mean(1.0, c) +
                                                         1e-6);
  }
}

TEST_CASE("sampler agrees with the truncated-series construction") {
  // An independent oracle: PG(1, c) equals in distribution
  // (1/2pi^2) sum_k g_k / ((k+1/2)^2 + c^2/(4pi^2)) with unit-exponential
  // g_k, truncated here at 2000 terms.
  RngStream rng(101);
  const int n_sampler = 30000;
  const int n_oracle = 8000;
  for (double c : {0.0, 2.0}) {
    std::vector<double> a(n_sampler), o(n_oracle);
    for (int i = 0; i < n_sampler; ++i) a[i] = pg_sample(1.0, c, rng);
    for (int i = 0; i < n_oracle; ++i)
      o[i] = testutil::pg1_series_draw(c, 2000, rng);
    const double se_m = std::sqrt(testutil::se_mean(a) * testutil::se_mean(a) +
                                  testutil::se_mean(o) * testutil::se_mean(o));
    CHECK(std::abs(testutil::mean_of(a) - testutil::mean_of(o)) < 5.0 * se_m);
    const double se_v = std::sqrt(testutil::se_var(a) * testutil::se_var(a) +
                                  testutil::se_var(o) * testutil::se_var(o));
    CHECK(std::abs(testutil::var_of(a) - testutil::var_of(o)) < 5.0 * se_v);
  }
}

TEST_CASE("argument validation") {
  RngStream rng(103);
  CHECK_THROWS_AS(pg_sample(0.0, 1.0, rng), Error);
  CHECK_THROWS_AS(pg_sample(-2.0, 1.0, rng), Error);
  CHECK_THROWS_AS(pg_sample(1.5, 1.0, rng), Error);
  CHECK_THROWS_AS(
      pg_sample(1.0, std::numeric_limits<double>::infinity(), rng), Error);
  CHECK_THROWS_AS(
      pg_sample(1.0, std::numeric_limits<double>::quiet_NaN(), rng), Error);
  // Integer-valued doubles are accepted.
  CHECK(pg_sample(2.0, 0.5, rng) > 0.0);
}
