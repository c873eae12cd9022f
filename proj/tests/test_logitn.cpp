#include "doctest.h"
#include "helpers.hpp"
#include "lngp/logitn.hpp"

using namespace lngp;

TEST_CASE("softmax invariance and consistency") {
  RngStream rng(71);
  for (int rep = 0; rep < 200; ++rep) {
    const int K = 2 + static_cast<int>(rng.integer(5));
    Vector g(K);
    for (int k = 0; k < K; ++k) g[k] = rng.normal(0.0, 5.0);
    const Vector p = softmax_full(g);
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.minCoeff() >= 0.0);
    // Invariance to a constant shift (the additions themselves round, so
    // the comparison allows that rounding and nothing more).
    const Vector shifted = softmax_full(g.array() + 123.456);
    CHECK((p - shifted).cwiseAbs().maxCoeff() < 1e-13);
    // Reduced form agrees with the full form.
    const Vector q = softmax_reduced(gamma_to_omega(g));
    CHECK((p - q).cwiseAbs().maxCoeff() < 1e-14);
  }
  // With dyadic-rational entries and shift every addition is exact, so
  // the invariance must hold bit for bit.
  Vector d(3), ds(3);
  d << 1.5, -2.0, 0.25;
  ds << 65.5, 62.0, 64.25;
  CHECK((softmax_full(d) - softmax_full(ds)).cwiseAbs().maxCoeff() == 0.0);

  // Extreme values saturate cleanly rather than overflowing.
  Vector big(3);
  big << 800.0, 0.0, -800.0;
  const Vector p = softmax_full(big);
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[2] == 0.0);
  CHECK(std::isfinite(p.sum()));
}

TEST_CASE("gamma_to_omega is the last-category contrast") {
  Vector g(4);
  g << 1.0, -2.0, 0.5, 3.0;
  const Vector w = gamma_to_omega(g);
  REQUIRE(w.size() == 3);
  CHECK(w[0] == -2.0);
  CHECK(w[1] == -5.0);
  CHECK(w[2] == -2.5);
}

TEST_CASE("prob field validation") {
  ProbField f;
  f.pi = Matrix::Constant(4, 3, 1.0 / 3.0);
  CHECK_NOTHROW(f.validate());
  f.pi(2, 0) = 0.5;
  CHECK_THROWS_AS(f.validate(), Error);
  f.pi(2, 0) = 1.0 / 3.0;
  f.pi(1, 1) = -1e-6;
  f.pi(1, 2) = 2.0 / 3.0 + 1e-6;
  CHECK_THROWS_AS(f.validate(), Error);
}

TEST_CASE("log-ratio covariance expands the loading kernel") {
  RngStream rng(73);
  for (int rep = 0; rep < 40; ++rep) {
    const int K = 2 + static_cast<int>(rng.integer(5));
    GPParams gp;
    gp.sigma_star = testutil::random_spd(K, rng);
    gp.decays.resize(K);
    for (int d = 0; d < K; ++d) gp.decays[d] = rng.uniform(0.3, 3.0);
    gp.beta = Vector::Zero(K - 1);

    const Matrix a_star = symmetric_sqrt(gp.sigma_star);
    const double dt = rng.uniform() * 2.0;
    Vector corr(K);
    for (int d = 0; d < K; ++d) corr[d] = std::exp(-gp.decays[d] * dt);
    const Matrix ck = a_star * corr.asDiagonal() * a_star.transpose();

    const int i = static_cast<int>(rng.integer(K));
    const int j = static_cast<int>(rng.integer(K));
    const int k = static_cast<int>(rng.integer(K));
    const int l = static_cast<int>(rng.integer(K));
    const double want = ck(i, j) - ck(i, l) - ck(k, j) + ck(k, l);
    CHECK(logratio_cov(i, j, k, l, dt, gp) ==
          doctest::Approx(want).epsilon(1e-12));
    // Degenerate contrasts are exactly zero.
    CHECK(logratio_cov(i, j, i, l, dt, gp) == 0.0);
    CHECK(logratio_cov(i, j, k, j, dt, gp) == 0.0);
  }
}

TEST_CASE("log-ratio correlation curves start at one") {
  RngStream rng(79);
  GPParams gp;
  gp.sigma_star = testutil::random_spd(3, rng);
  gp.decays.resize(3);
  gp.decays << 1.0, 0.8, 1.5;
  gp.beta = Vector::Zero(2);
  const std::vector<double> lags = {0.0, 0.1, 0.5, 1.0, 2.0};
  for (int i = 0; i < 3; ++i)
    for (int k = i + 1; k < 3; ++k) {
      const auto curve = logratio_corr_curve(i, i, k, k, lags, gp);
      REQUIRE(curve.size() == lags.size());
      CHECK(curve[0] == doctest::Approx(1.0).epsilon(1e-12));
      for (double v : curve) CHECK(std::abs(v) <= 1.0 + 1e-9);
      // Single-decay special case: equal decays make the curve exactly
      // exp(-phi * lag) regardless of the loadings.
    }
  // With all decays equal the normalized curve is the common correlation.
  gp.decays.setConstant(1.3);
  const auto curve = logratio_corr_curve(0, 0, 2, 2, lags, gp);
  for (std::size_t q = 0; q < lags.size(); ++q)
    CHECK(curve[q] == doctest::Approx(std::exp(-1.3 * lags[q])).epsilon(1e-10));

  CHECK_THROWS_AS(logratio_corr_curve(0, 0, 0, 0, lags, gp), Error);
}

TEST_CASE("independence structure") {
  RngStream rng(83);
  for (int rep = 0; rep < 30; ++rep) {
    const int K = 2 + static_cast<int>(rng.integer(5));
    Vector a(K);
    for (int k = 0; k < K; ++k) a[k] = rng.uniform(0.1, 4.0);
    const Matrix s = independence_structure(a);
    REQUIRE(s.rows() == K - 1);
    for (int i = 0; i < K - 1; ++i)
      for (int j = 0; j < K - 1; ++j) {
        const double want = (i == j ? a[i] + a[K - 1] : a[K - 1]);
        CHECK(s(i, j) == doctest::Approx(want).epsilon(1e-14));
      }
  }
}
