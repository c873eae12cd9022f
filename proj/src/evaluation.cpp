#include "lngp/evaluation.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "lngp/distributions.hpp"
#include "lngp/logitn.hpp"
#include "lngp/trajectory.hpp"

namespace lngp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double bvn_logdens(double y0, double y1, const Vec2& mu, const Mat2& cov) {
  const double a = cov(0, 0), b = cov(0, 1), c = cov(1, 1);
  const double det = a * c - b * b;
  if (!(det > 0.0) || !(a > 0.0))
    throw Error("bivariate covariance is not positive definite");
  const double d0 = y0 - mu[0], d1 = y1 - mu[1];
  const double quad = (c * d0 * d0 - 2.0 * b * d0 * d1 + a * d1 * d1) / det;
  return -kLog2Pi - 0.5 * std::log(det) - 0.5 * quad;
}

// Type-7 quantile of a sorted vector.
double sorted_quantile(const std::vector<double>& v, double q) {
  if (v.empty()) throw Error("quantile of empty sample");
  const double h = q * (static_cast<double>(v.size()) - 1.0);
  const std::size_t lo =
      static_cast<std::size_t>(std::max(0.0, std::floor(h)));
  if (lo + 1 >= v.size()) return v.back();
  const double frac = h - static_cast<double>(lo);
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

std::vector<std::vector<int>> all_permutations(int K) {
  std::vector<int> idx(K);
  for (int i = 0; i < K; ++i) idx[i] = i;
  std::vector<std::vector<int>> all;
  do {
    all.push_back(idx);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return all;
}

void apply_perm_draw(SampleStore& store, std::size_t i,
                     const std::vector<int>& perm) {
  const int K = store.K;
  const int p = store.p;
  std::vector<int> inv(K);
  for (int k = 0; k < K; ++k) inv[perm[k]] = k;

  MixtureParams& mix = store.mixture[i];
  MixtureParams old_mix = mix;
  for (int k = 0; k < K; ++k) {
    mix.xi[k] = old_mix.xi[perm[k]];
    mix.omega_cov[k] = old_mix.omega_cov[perm[k]];
  }

  GPParams& gp = store.gp[i];
  const GPParams old_gp = gp;
  for (int k = 0; k < K; ++k) gp.decays[k] = old_gp.decays[perm[k]];
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < K; ++l)
      gp.sigma_star(k, l) = old_gp.sigma_star(perm[k], perm[l]);
  // Mean coefficients are contrasts against the last category; rebuild
  // them against the permuted reference.
  std::vector<Vector> full(K, Vector::Zero(p));
  for (int k = 0; k < K - 1; ++k) full[k] = old_gp.beta.segment(k * p, p);
  for (int k = 0; k < K - 1; ++k)
    gp.beta.segment(k * p, p) = full[perm[k]] - full[perm[K - 1]];

  Matrix old_pi = store.pi[i];
  for (int k = 0; k < K; ++k) store.pi[i].col(k) = old_pi.col(perm[k]);

  for (int& zt : store.z[i])
    if (zt >= 0) zt = inv[zt];
}

double perm_cost(const std::vector<Vec2>& xi, const std::vector<int>& perm,
                 const std::vector<Vec2>& ref) {
  double cost = 0.0;
  for (std::size_t k = 0; k < ref.size(); ++k)
    cost += (xi[perm[k]] - ref[k]).squaredNorm();
  return cost;
}

}  // namespace

// ---------------------------------------------------------------------
// Scenario and simulation.

Vector SimScenario::times() const {
  Vector t(T);
  const double lag = time_span / T;
  for (int i = 0; i < T; ++i) t[i] = (i + 1) * lag;
  return t;
}

Matrix SimScenario::design() const {
  // Intercept plus time scaled to (0, 1]: the latent field's correlation
  // sees raw times, while the mean drift is bounded by the coefficients.
  Matrix X(T, 2);
  X.col(0).setOnes();
  X.col(1) = times() / time_span;
  return X;
}

void SimScenario::validate() const {
  if (T < 1) throw ValidationError("scenario needs at least one time point");
  if (!(time_span > 0.0))
    throw ValidationError("scenario time span must be positive");
  gp.validate();
  mixture.validate();
  if (mixture.K() != gp.K())
    throw ValidationError("mixture and field component counts differ");
  if (gp.beta.size() != 2 * (gp.K() - 1))
    throw ValidationError(
        "beta must have an intercept and a slope per non-reference "
        "category");
}

SimScenario SimScenario::defaults(int T) {
  SimScenario sc;
  sc.T = T;
  sc.time_span = 20.0;

  sc.gp.beta = Vector(4);
  sc.gp.beta << 0.0, -5.0, 3.0, -7.0;
  sc.gp.sigma_star = Matrix(3, 3);
  sc.gp.sigma_star << 5.0, -2.0, 0.0, -2.0, 5.0, 3.0, 0.0, 3.0, 5.0;
  sc.gp.decays = Vector(3);
  sc.gp.decays << 1.0, 0.8, 1.5;

  sc.mixture.xi = {Vec2(0.0, 0.0), Vec2(3.0, 0.0), Vec2(0.0, -3.0)};
  Mat2 o1, o2, o3;
  o1 << 1.0, 0.0, 0.0, 3.0;
  o2 << 1.0, 1.272, 1.272, 2.0;
  o3 << 2.0, -0.5, -0.5, 0.5;
  sc.mixture.omega_cov = {o1, o2, o3};
  return sc;
}

SimResult simulate_dataset(const SimScenario& sc, std::uint64_t seed) {
  sc.validate();
  RngStream rng(seed);
  const int T = sc.T;
  const int K = sc.K();
  const int p = 2;

  SimResult r;
  r.times = sc.times();
  r.X = sc.design();

  // Factor paths: stationary AR recursion, exact for exponential
  // correlation on any time grid.
  Matrix eta(K, T);
  for (int d = 0; d < K; ++d) {
    eta(d, 0) = rng.normal();
    for (int i = 1; i < T; ++i) {
      const double rho =
          std::exp(-sc.gp.decays[d] * (r.times[i] - r.times[i - 1]));
      eta(d, i) = rho * eta(d, i - 1) +
                  std::sqrt(1.0 - rho * rho) * rng.normal();
    }
  }

  const Matrix astar = symmetric_sqrt(sc.gp.sigma_star);
  std::vector<Mat2> chol(K);
  for (int k = 0; k < K; ++k) {
    Eigen::LLT<Mat2> llt(sc.mixture.omega_cov[k]);
    if (llt.info() != Eigen::Success)
      throw Error("component covariance not positive definite");
    chol[k] = llt.matrixL();
  }

  r.omega.resize(T, K - 1);
  r.pi.resize(T, K);
  r.z.resize(T);
  r.y.resize(T, 2);
  for (int i = 0; i < T; ++i) {
    Vector gamma = Vector::Zero(K);
    for (int k = 0; k < K - 1; ++k)
      gamma[k] = r.X.row(i).dot(sc.gp.beta.segment(k * p, p));
    gamma += astar * eta.col(i);
    const Vector pirow = softmax_full(gamma);
    r.pi.row(i) = pirow.transpose();
    for (int k = 0; k < K - 1; ++k) r.omega(i, k) = gamma[k] - gamma[K - 1];
    const int zi = rng.categorical(pirow);
    r.z[i] = zi;
    const Vec2 n2(rng.normal(), rng.normal());
    r.y.row(i) = (sc.mixture.xi[zi] + chol[zi] * n2).transpose();
  }

  Increments incr;
  incr.y = r.y;
  incr.y_observed.assign(T, true);
  incr.bearings = Vector::Zero(T + 1);
  incr.bearing_observed.assign(T + 1, true);
  r.coords = reconstruct(Vec2(0.0, 0.0), Vec2(1.0, 0.0), incr);
  return r;
}

// ---------------------------------------------------------------------
// Likelihood and model choice.

double complete_loglik(const Matrix& y, const std::vector<bool>& observed,
                       const std::vector<int>& z,
                       const MixtureParams& mixture, const Matrix& pi) {
  const int n = static_cast<int>(pi.rows());
  if (y.rows() != n || static_cast<int>(observed.size()) != n ||
      static_cast<int>(z.size()) != n)
    throw Error("complete_loglik: inconsistent shapes");
  double total = 0.0;
  for (int t = 0; t < n; ++t) {
    if (!observed[t] || z[t] < 0) continue;
    const double pz = pi(t, z[t]);
    if (!(pz > 0.0)) return kNegInf;
    total += std::log(pz) +
             bvn_logdens(y(t, 0), y(t, 1), mixture.xi[z[t]],
                         mixture.omega_cov[z[t]]);
  }
  return total;
}

ICLEntry icl_score(const SampleStore& store, int m) {
  if (store.size() == 0) throw Error("cannot score an empty sample store");
  ICLEntry e;
  e.K = store.K;
  e.m = m;
  e.map_index = store.map_index();
  e.nu = 5 * store.K + store.p * (store.K - 1) + store.K +
         store.K * (store.K + 1) / 2;
  const double penalty =
      0.5 * e.nu * std::log(static_cast<double>(store.n_obs));
  e.value = store.loglik[e.map_index] - penalty;
  e.printed = -e.value;
  return e;
}

// ---------------------------------------------------------------------
// Posterior summaries.

ProbBands probability_timeseries(const SampleStore& store, double lo,
                                 double hi) {
  if (store.size() == 0) throw Error("empty sample store");
  const int T = store.T;
  const int K = store.K;
  const std::size_t N = store.size();
  ProbBands bands;
  bands.mean = Matrix::Zero(T, K);
  bands.lower.resize(T, K);
  bands.upper.resize(T, K);
  std::vector<double> col(N);
  for (int t = 0; t < T; ++t)
    for (int k = 0; k < K; ++k) {
      for (std::size_t i = 0; i < N; ++i) col[i] = store.pi[i](t, k);
      std::sort(col.begin(), col.end());
      double sum = 0.0;
      for (double v : col) sum += v;
      bands.mean(t, k) = sum / static_cast<double>(N);
      bands.lower(t, k) = sorted_quantile(col, lo);
      bands.upper(t, k) = sorted_quantile(col, hi);
    }
  return bands;
}

double projected_normal_density(double theta, const Vec2& mu,
                                const Mat2& sigma) {
  Mat2 s = sigma;
  s(0, 0) += 1e-10;
  s(1, 1) += 1e-10;
  const double det = s.determinant();
  if (!(det > 0.0) || !(s(0, 0) > 0.0))
    throw Error("projected normal needs a positive definite covariance");
  const Mat2 inv = s.inverse();
  const Vec2 u(std::cos(theta), std::sin(theta));
  const double A = u.dot(inv * u);
  const double B = u.dot(inv * mu);
  const double C = mu.dot(inv * mu);
  const double D = B / std::sqrt(A);
  // Cauchy-Schwarz gives D^2 <= C, so both exponents are nonpositive
  // whenever C >= 0; no overflow is possible.
  const double base = std::exp(-0.5 * C);
  const double tail = D * norm_cdf(D) * std::sqrt(2.0 * M_PI) *
                      std::exp(0.5 * (D * D - C));
  return (base + tail) / (2.0 * M_PI * A * std::sqrt(det));
}

Matrix angle_density(const SampleStore& store, const Vector& grid) {
  if (store.size() == 0) throw Error("empty sample store");
  const int K = store.K;
  Matrix out = Matrix::Zero(grid.size(), K);
  for (const MixtureParams& mix : store.mixture)
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < grid.size(); ++j)
        out(j, k) +=
            projected_normal_density(grid[j], mix.xi[k], mix.omega_cov[k]);
  out /= static_cast<double>(store.size());
  return out;
}

Matrix step_density(const SampleStore& store, const Vector& grid,
                    int mc_draws, std::uint64_t seed) {
  if (store.size() == 0) throw Error("empty sample store");
  if (mc_draws < 2) throw Error("step density needs at least two draws");
  const int K = store.K;
  const std::size_t N = store.size();
  const int per = static_cast<int>((mc_draws + N - 1) / N);
  RngStream rng(seed);
  Matrix out = Matrix::Zero(grid.size(), K);

  std::vector<double> pool;
  pool.reserve(per * N);
  for (int k = 0; k < K; ++k) {
    pool.clear();
    for (std::size_t i = 0; i < N; ++i) {
      Eigen::LLT<Mat2> llt(store.mixture[i].omega_cov[k]);
      if (llt.info() != Eigen::Success)
        throw Error("component covariance not positive definite");
      const Mat2 chol = llt.matrixL();
      for (int d = 0; d < per; ++d) {
        const Vec2 y =
            store.mixture[i].xi[k] + chol * Vec2(rng.normal(), rng.normal());
        pool.push_back(y.norm());
      }
    }
    const double n = static_cast<double>(pool.size());
    double mean = 0.0;
    for (double v : pool) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : pool) var += (v - mean) * (v - mean);
    var /= (n - 1.0);
    std::vector<double> sorted = pool;
    std::sort(sorted.begin(), sorted.end());
    const double iqr =
        sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
    double spread = std::sqrt(var);
    if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
    double h = 0.9 * spread * std::pow(n, -0.2);
    if (!(h > 0.0)) h = std::max(1e-6, 0.01 * std::abs(mean));

    // Gaussian KDE with reflection at zero (step lengths are nonnegative).
    const double norm = 1.0 / (n * h * std::sqrt(2.0 * M_PI));
    for (int j = 0; j < grid.size(); ++j) {
      double acc = 0.0;
      for (double v : pool) {
        const double a = (grid[j] - v) / h;
        const double b = (grid[j] + v) / h;
        acc += std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b);
      }
      out(j, k) = acc * norm;
    }
  }
  return out;
}

LogRatioReport logratio_report(const SampleStore& store,
                               const std::vector<double>& lags, double lo,
                               double hi) {
  if (store.size() == 0) throw Error("empty sample store");
  if (lags.empty()) throw Error("log-ratio report needs at least one lag");
  const int K = store.K;
  const std::size_t N = store.size();
  LogRatioReport rep;
  rep.lags = lags;
  for (int i = 0; i < K; ++i)
    for (int k = i + 1; k < K; ++k) rep.pairs.emplace_back(i, k);

  const std::size_t L = lags.size();
  for (const auto& [i, k] : rep.pairs) {
    Matrix vals(N, L);
    for (std::size_t d = 0; d < N; ++d) {
      const std::vector<double> curve =
          logratio_corr_curve(i, i, k, k, lags, store.gp[d]);
      for (std::size_t l = 0; l < L; ++l) vals(d, l) = curve[l];
    }
    Matrix summary(L, 3);
    std::vector<double> col(N);
    for (std::size_t l = 0; l < L; ++l) {
      for (std::size_t d = 0; d < N; ++d) col[d] = vals(d, l);
      std::sort(col.begin(), col.end());
      double sum = 0.0;
      for (double v : col) sum += v;
      summary(l, 0) = sum / static_cast<double>(N);
      summary(l, 1) = sorted_quantile(col, lo);
      summary(l, 2) = sorted_quantile(col, hi);
    }
    rep.curves.push_back(std::move(summary));
  }
  return rep;
}

// ---------------------------------------------------------------------
// Relabeling.

std::vector<std::vector<int>> relabel_store(SampleStore& store) {
  const int K = store.K;
  const std::size_t N = store.size();
  std::vector<std::vector<int>> applied;
  applied.reserve(N);
  if (N == 0) return applied;
  const auto perms = all_permutations(K);

  std::vector<int> identity(K);
  for (int k = 0; k < K; ++k) identity[k] = k;
  applied.push_back(identity);
  std::vector<Vec2> ref_sum = store.mixture[0].xi;

  for (std::size_t i = 1; i < N; ++i) {
    std::vector<Vec2> ref(K);
    for (int k = 0; k < K; ++k)
      ref[k] = ref_sum[k] / static_cast<double>(i);
    const std::vector<int>* best = &perms[0];
    double best_cost = perm_cost(store.mixture[i].xi, perms[0], ref);
    for (std::size_t p = 1; p < perms.size(); ++p) {
      const double c = perm_cost(store.mixture[i].xi, perms[p], ref);
      if (c < best_cost) {
        best_cost = c;
        best = &perms[p];
      }
    }
    if (*best != identity) apply_perm_draw(store, i, *best);
    applied.push_back(*best);
    for (int k = 0; k < K; ++k) ref_sum[k] += store.mixture[i].xi[k];
  }
  return applied;
}

std::vector<int> align_to_reference(const SampleStore& store,
                                    const std::vector<Vec2>& reference) {
  const int K = store.K;
  if (static_cast<int>(reference.size()) != K)
    throw Error("reference size does not match component count");
  if (store.size() == 0) throw Error("empty sample store");
  std::vector<Vec2> mean(K, Vec2::Zero());
  for (const MixtureParams& mix : store.mixture)
    for (int k = 0; k < K; ++k) mean[k] += mix.xi[k];
  for (int k = 0; k < K; ++k) mean[k] /= static_cast<double>(store.size());

  const auto perms = all_permutations(K);
  const std::vector<int>* best = &perms[0];
  double best_cost = perm_cost(mean, perms[0], reference);
  for (std::size_t p = 1; p < perms.size(); ++p) {
    const double c = perm_cost(mean, perms[p], reference);
    if (c < best_cost) {
      best_cost = c;
      best = &perms[p];
    }
  }
  return *best;
}

void apply_permutation(SampleStore& store, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != store.K)
    throw Error("permutation size does not match component count");
  for (std::size_t i = 0; i < store.size(); ++i)
    apply_perm_draw(store, i, perm);
}

}  // namespace lngp
