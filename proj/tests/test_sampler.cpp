#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "lngp/evaluation.hpp"
#include "lngp/logitn.hpp"
#include "lngp/sampler.hpp"
#include "lngp/trajectory.hpp"

using namespace lngp;

namespace {

double logistic_fn(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
}

ModelData unobserved_data(int n, const Vector& times) {
  ModelData d;
  d.times = times;
  d.y = Matrix::Constant(n, 2, std::numeric_limits<double>::quiet_NaN());
  d.y_observed.assign(n, false);
  d.X = Matrix::Ones(n, 1);
  return d;
}

}  // namespace

TEST_CASE("probability field from the reduced field") {
  RngStream rng(139);
  Matrix omega(5, 2);
  for (int t = 0; t < 5; ++t)
    for (int k = 0; k < 2; ++k) omega(t, k) = rng.normal(0.0, 3.0);
  const Matrix pi = prob_field_from_omega(omega);
  REQUIRE(pi.rows() == 5);
  REQUIRE(pi.cols() == 3);
  for (int t = 0; t < 5; ++t) {
    CHECK(pi.row(t).sum() == doctest::Approx(1.0).epsilon(1e-12));
    const Vector direct = softmax_reduced(omega.row(t).transpose());
    CHECK((pi.row(t).transpose() - direct).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("label draws follow the analytic posterior") {
  RngStream rng(149);
  MixtureParams mix;
  mix.xi = {Vec2(0.0, 0.0), Vec2(2.0, 0.0)};
  mix.omega_cov = {Mat2::Identity(), Mat2::Identity()};

  Matrix y(1, 2);
  y << 0.0, 0.0;
  Matrix pi(1, 2);
  pi << 0.3, 0.7;
  std::vector<bool> usable = {true};

  // Posterior weight of component 0 at y = 0: densities differ by
  // exp(-|xi_1|^2 / 2) = exp(-2).
  const double w0 = 0.3;
  const double w1 = 0.7 * std::exp(-2.0);
  const double p0 = w0 / (w0 + w1);
  const int n = 20000;
  int c0 = 0;
  for (int i = 0; i < n; ++i)
    if (draw_labels(y, usable, pi, mix, rng)[0] == 0) ++c0;
  const double se = std::sqrt(p0 * (1.0 - p0) / n);
  CHECK(std::abs(c0 / static_cast<double>(n) - p0) < 5.0 * se);

  // A degenerate probability row pins the label.
  pi << 1.0, 0.0;
  for (int i = 0; i < 50; ++i)
    CHECK(draw_labels(y, usable, pi, mix, rng)[0] == 0);

  // Unusable rows carry no label.
  std::vector<bool> off = {false};
  CHECK(draw_labels(y, off, pi, mix, rng)[0] == -1);

  // If every weight underflows the draw is an error, not a silent pick.
  Matrix bad(1, 2);
  bad << 1e308, 0.0;
  CHECK_THROWS_AS(draw_labels(bad, usable, pi, mix, rng), Error);
}

TEST_CASE("mixture scan reproduces the prior on empty components") {
  RngStream rng(151);
  Priors priors = Priors::defaults(2);
  MixtureParams mix;
  mix.xi = {Vec2(0.0, 0.0), Vec2(0.0, 0.0)};
  mix.omega_cov = {Mat2::Identity(), Mat2::Identity()};
  Matrix y(1, 2);
  y << 0.0, 0.0;
  std::vector<bool> usable = {false};
  std::vector<int> z = {-1};

  const int n = 20000;
  std::vector<double> xi_coord(n), om_diag(n);
  for (int i = 0; i < n; ++i) {
    mix = draw_mixture(y, usable, z, mix, priors, rng);
    xi_coord[i] = mix.xi[0][0];
    om_diag[i] = mix.omega_cov[1](1, 1);
  }
  // xi | Omega with no data is exactly the N(0, 100 I) prior.
  CHECK(testutil::ks_distance(
            xi_coord, [](double x) { return norm_cdf(x / 10.0); }) < 0.015);
  // Omega diagonals under IW(3, I) are inverse-gamma(1, rate 1/2).
  CHECK(testutil::ks_distance(om_diag, [](double x) {
          return x > 0.0 ? std::exp(-0.5 / x) : 0.0;
        }) < 0.015);
}

TEST_CASE("mixture scan concentrates on the data-generating values") {
  RngStream rng(157);
  const int n = 5000;
  const Vec2 true_xi(3.0, -1.0);
  Mat2 true_cov;
  true_cov << 2.0, 0.5, 0.5, 1.0;
  Matrix y(n, 2);
  for (int i = 0; i < n; ++i)
    y.row(i) = sample_mvn(true_xi, true_cov, rng).transpose();
  Vector ybar = y.colwise().mean();
  std::vector<bool> usable(n, true);
  std::vector<int> z(n, 0);

  Priors priors = Priors::defaults(2);
  MixtureParams mix;
  mix.xi = {Vec2(0.0, 0.0), Vec2(0.0, 0.0)};
  mix.omega_cov = {Mat2::Identity(), Mat2::Identity()};

  const int scans = 2500, warm = 500;
  Vec2 xi_acc = Vec2::Zero();
  Mat2 om_acc = Mat2::Zero();
  for (int s = 0; s < scans; ++s) {
    mix = draw_mixture(y, usable, z, mix, priors, rng);
    if (s >= warm) {
      xi_acc += mix.xi[0];
      om_acc += mix.omega_cov[0];
    }
  }
  xi_acc /= (scans - warm);
  om_acc /= (scans - warm);
  CHECK(std::abs(xi_acc[0] - ybar[0]) < 0.06);
  CHECK(std::abs(xi_acc[1] - ybar[1]) < 0.06);
  CHECK((om_acc - true_cov).cwiseAbs().maxCoeff() < 0.15);
}

TEST_CASE("field update holds the latent prior invariant without labels") {
  Vector times(3);
  times << 0.5, 1.0, 1.5;
  ModelData data = unobserved_data(3, times);
  ChainConfig cfg;
  cfg.K = 2;
  cfg.m = 2;
  cfg.seed = 163;
  Chain chain(std::move(data), cfg, Priors::defaults(2));
  REQUIRE(chain.state().z == std::vector<int>({-1, -1, -1}));

  GPParams& gp = chain.gp();
  gp.sigma_star << 3.0, 1.0, 1.0, 2.0;
  gp.decays << 0.9, 1.7;
  gp.beta[0] = 0.4;
  chain.rebuild_factor();
  const Matrix cov = testutil::dense_field_cov(times, gp);

  const int warm = 2000, keep = 60000;
  Matrix draws(keep, 3);
  for (int s = 0; s < warm + keep; ++s) {
    chain.update_omega_field();
    if (s >= warm)
      for (int t = 0; t < 3; ++t) draws(s - warm, t) = chain.state().omega(t, 0);
  }
  Vector mu = draws.colwise().mean();
  Matrix centered = draws.rowwise() - mu.transpose();
  Matrix sc = centered.transpose() * centered / (keep - 1);
  for (int t = 0; t < 3; ++t) {
    CHECK(std::abs(mu[t] - 0.4) < 0.08);
    for (int u = 0; u < 3; ++u)
      CHECK(std::abs(sc(t, u) - cov(t, u)) < 0.15);
  }
}

TEST_CASE("field update targets the logistic posterior with a label") {
  Vector times(1);
  times << 1.0;
  ModelData data = unobserved_data(1, times);
  data.y.row(0) << 0.1, 0.2;
  data.y_observed[0] = true;
  ChainConfig cfg;
  cfg.K = 2;
  cfg.m = 1;
  cfg.seed = 167;
  Chain chain(std::move(data), cfg, Priors::defaults(2));

  GPParams& gp = chain.gp();
  gp.sigma_star = Matrix::Identity(2, 2);  // prior variance of omega is 2
  gp.decays << 1.0, 1.0;
  gp.beta[0] = 0.0;
  chain.rebuild_factor();
  chain.state().z[0] = 0;  // pinned label; only the field moves

  const int warm = 2000, keep = 40000;
  std::vector<double> draws(keep);
  for (int s = 0; s < warm + keep; ++s) {
    chain.update_omega_field();
    if (s >= warm) draws[s - warm] = chain.state().omega(0, 0);
  }

  // Numeric CDF of the target density sigma(w) * N(w | 0, 2).
  const double lo = -12.0, hi = 12.0;
  const int grid_n = 24001;
  std::vector<double> gx(grid_n), cdf(grid_n);
  double total = 0.0;
  const double h = (hi - lo) / (grid_n - 1);
  std::vector<double> dens(grid_n);
  for (int i = 0; i < grid_n; ++i) {
    gx[i] = lo + h * i;
    dens[i] = logistic_fn(gx[i]) *
              std::exp(-gx[i] * gx[i] / 4.0) / std::sqrt(4.0 * M_PI);
  }
  cdf[0] = 0.0;
  for (int i = 1; i < grid_n; ++i)
    cdf[i] = cdf[i - 1] + 0.5 * h * (dens[i - 1] + dens[i]);
  total = cdf[grid_n - 1];
  auto target_cdf = [&](double x) {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    const double pos = (x - lo) / h;
    const int i = static_cast<int>(pos);
    const double w = pos - i;
    return ((1.0 - w) * cdf[i] + w * cdf[i + 1]) / total;
  };
  CHECK(testutil::ks_distance(draws, target_cdf) < 0.02);
}

TEST_CASE("missing-coordinate imputation recovers a pinned position") {
  // A straight unit-step track with one unobserved interior fix; with
  // near-deterministic emissions the imputed point must return to the
  // line.
  const int n = 5;  // grid size 7 -> 5 increments
  ModelData data;
  data.times = Vector::LinSpaced(n, 1.0, 5.0);
  data.y = Matrix::Zero(n, 2);
  data.y_observed.assign(n, true);
  data.X = Matrix::Ones(n, 1);
  data.has_grid = true;
  data.coords.resize(n + 2, 2);
  for (int g = 0; g < n + 2; ++g) data.coords.row(g) << g, 0.0;
  data.coords_observed.assign(n + 2, true);
  data.coords_observed[3] = false;
  data.coords.row(3).setConstant(std::numeric_limits<double>::quiet_NaN());

  ChainConfig cfg;
  cfg.K = 2;
  cfg.m = 2;
  cfg.seed = 173;
  Chain chain(std::move(data), cfg, Priors::defaults(2));

  std::fill(chain.state().z.begin(), chain.state().z.end(), 0);
  chain.mixture().xi = {Vec2(1.0, 0.0), Vec2(10.0, 10.0)};
  chain.mixture().omega_cov = {Mat2::Identity() * 1e-4, Mat2::Identity()};
  // Start the imputed fix well away from the line; the walk must find its
  // way back (the proposal window covers increments g-2..g, so rejected
  // moves never touch the cached increments).
  chain.state().coords.row(3) << 5.5, 2.0;

  const int iters = 4000;
  Vec2 acc = Vec2::Zero();
  int kept = 0;
  for (int s = 0; s < iters; ++s) {
    chain.update_missing();
    if (s >= iters / 2) {
      acc += chain.state().coords.row(3).transpose();
      ++kept;
    }
  }
  acc /= kept;
  CHECK(std::abs(acc[0] - 3.0) < 0.05);
  CHECK(std::abs(acc[1] - 0.0) < 0.05);

  // The cached increments always match the current coordinates.
  TrackGrid grid;
  grid.coords = chain.state().coords;
  grid.observed.assign(n + 2, true);
  Increments inc = decompose(grid);
  CHECK((inc.y - chain.data().y).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("chain runs deterministically and retains the right draws") {
  SimScenario sc = SimScenario::defaults(40);
  SimResult sim = simulate_dataset(sc, 2024);
  ModelData data;
  data.times = sim.times;
  data.y = sim.y;
  data.y_observed.assign(40, true);
  data.X = sim.X;

  ChainConfig cfg;
  cfg.K = 3;
  cfg.m = 3;
  cfg.iters = 400;
  cfg.burnin = 100;
  cfg.thin = 3;
  cfg.seed = 99;

  SampleStore a = run_chain(data, cfg, Priors::defaults(3));
  CHECK(static_cast<long long>(a.size()) == cfg.retained());
  REQUIRE(a.size() == 100);
  CHECK(a.T == 40);
  CHECK(a.n_obs == 40);
  for (double ll : a.loglik) CHECK(std::isfinite(ll));
  for (const Matrix& pi : a.pi) {
    CHECK(pi.rows() == 40);
    for (int t = 0; t < 40; ++t)
      CHECK(pi.row(t).sum() == doctest::Approx(1.0).epsilon(1e-9));
  }
  for (const auto& zs : a.z)
    for (int zt : zs) CHECK((zt >= 0 && zt < 3));

  SampleStore b = run_chain(data, cfg, Priors::defaults(3));
  REQUIRE(b.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.loglik[i] == b.loglik[i]);
    CHECK((a.pi[i] - b.pi[i]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.gp[i].beta - b.gp[i].beta).cwiseAbs().maxCoeff() == 0.0);
  }
  cfg.seed = 100;
  SampleStore c = run_chain(data, cfg, Priors::defaults(3));
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i)
    any_diff = any_diff || (a.loglik[i] != c.loglik[i]);
  CHECK(any_diff);
}

TEST_CASE("hyper block moves and respects its bounds") {
  SimScenario sc = SimScenario::defaults(60);
  SimResult sim = simulate_dataset(sc, 7);
  ModelData data;
  data.times = sim.times;
  data.y = sim.y;
  data.y_observed.assign(60, true);
  data.X = sim.X;
  ChainConfig cfg;
  cfg.K = 3;
  cfg.m = 5;
  cfg.seed = 11;
  Priors priors = Priors::defaults(3);
  Chain chain(std::move(data), cfg, priors);
  int accepts = 0;
  for (int i = 0; i < 400; ++i) {
    chain.step();
    const GPParams& gp = chain.gp();
    for (int k = 0; k < 3; ++k) {
      CHECK(gp.decays[k] > priors.decay_lower);
      CHECK(gp.decays[k] < priors.decay_upper);
    }
    Eigen::LLT<Matrix> llt(gp.sigma_star);
    CHECK(llt.info() == Eigen::Success);
  }
  accepts = static_cast<int>(chain.hyper_accept_rate() * 400);
  CHECK(accepts > 0);  // the block is not stuck
}

TEST_CASE("configuration and data validation") {
  ChainConfig cfg;
  cfg.K = 1;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.K = 2;
  cfg.burnin = cfg.iters;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.burnin = 0;
  cfg.thin = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);

  ModelData d;
  d.times = Vector::Zero(2);  // not strictly increasing
  d.y = Matrix::Zero(2, 2);
  d.y_observed.assign(2, true);
  d.X = Matrix::Ones(2, 1);
  CHECK_THROWS_AS(d.validate(), ValidationError);

  Priors p = Priors::defaults(2);
  p.decay_lower = 2.0;
  p.decay_upper = 1.0;
  CHECK_THROWS_AS(p.validate(2), ValidationError);
}
