#include "lngp/sampler.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "lngp/distributions.hpp"
#include "lngp/evaluation.hpp"
#include "lngp/logitn.hpp"
#include "lngp/pg.hpp"

namespace lngp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double bvn_logdens(const Vec2& y, const Vec2& mu, const Mat2& cov) {
  const double a = cov(0, 0), b = cov(0, 1), c = cov(1, 1);
  const double det = a * c - b * b;
  if (!(det > 0.0) || !(a > 0.0))
    throw Error("bivariate covariance is not positive definite");
  const double d0 = y[0] - mu[0], d1 = y[1] - mu[1];
  const double quad = (c * d0 * d0 - 2.0 * b * d0 * d1 + a * d1 * d1) / det;
  return -kLog2Pi - 0.5 * std::log(det) - 0.5 * quad;
}

std::vector<int> random_perm(int n, RngStream& rng) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i >= 1; --i)
    std::swap(perm[i], perm[static_cast<int>(rng.integer(i + 1))]);
  return perm;
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

// ---------------------------------------------------------------------
// Model type validation.

void MixtureParams::validate() const {
  if (xi.empty() || xi.size() != omega_cov.size())
    throw Error("mixture parameter lists are inconsistent");
  for (const Mat2& c : omega_cov) {
    if (std::abs(c(0, 1) - c(1, 0)) > 1e-10 * (1.0 + c.cwiseAbs().maxCoeff()))
      throw Error("component covariance must be symmetric");
    if (!(c(0, 0) > 0.0) || !(c.determinant() > 0.0))
      throw Error("component covariance must be positive definite");
  }
}

Priors Priors::defaults(int K) {
  Priors p;
  p.sigma_star_iw_df = K + 1.0;
  p.sigma_star_iw_scale = Matrix::Identity(K, K);
  return p;
}

void Priors::validate(int K) const {
  if (!(omega_iw_df > 1.0))
    throw ValidationError("component IW degrees of freedom must exceed 1");
  if (!(omega_iw_scale.determinant() > 0.0))
    throw ValidationError("component IW scale must be positive definite");
  if (!(xi_cov.determinant() > 0.0))
    throw ValidationError("xi prior covariance must be positive definite");
  if (!(decay_lower > 0.0) || !(decay_lower < decay_upper))
    throw ValidationError("decay bounds must satisfy 0 < lower < upper");
  if (!(beta_var > 0.0))
    throw ValidationError("beta prior variance must be positive");
  if (!(sigma_df(K) > K - 1))
    throw ValidationError("sigma_star IW degrees of freedom too small");
  const Matrix s = sigma_scale(K);
  if (s.rows() != K || s.cols() != K)
    throw ValidationError("sigma_star IW scale has wrong dimension");
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success)
    throw ValidationError("sigma_star IW scale must be positive definite");
}

void ChainConfig::validate() const {
  if (K < 2) throw ValidationError("component count K must be at least 2");
  if (m < 1) throw ValidationError("neighbor count m must be at least 1");
  if (iters <= 0) throw ValidationError("iteration count must be positive");
  if (burnin < 0 || burnin >= iters)
    throw ValidationError("burnin must lie in [0, iters)");
  if (thin < 1) throw ValidationError("thin must be at least 1");
  if (!(adapt_target > 0.0 && adapt_target < 1.0))
    throw ValidationError("adapt_target must lie in (0,1)");
  if (!(adapt_decay > 0.5 && adapt_decay <= 1.0))
    throw ValidationError("adapt_decay must lie in (0.5, 1]");
}

void ModelData::validate() const {
  const int count = n();
  if (count < 1) throw ValidationError("dataset has no increments");
  for (int t = 1; t < count; ++t)
    if (!(times[t] > times[t - 1]))
      throw ValidationError("increment times must be strictly increasing");
  if (y.rows() != count || y.cols() != 2)
    throw ValidationError("y must be an n x 2 matrix");
  if (static_cast<int>(y_observed.size()) != count)
    throw ValidationError("y_observed length mismatch");
  if (X.rows() != count || X.cols() < 1)
    throw ValidationError("design matrix must be n x p with p >= 1");
  if (!X.allFinite())
    throw ValidationError("design matrix has non-finite entries");
  for (int t = 0; t < count; ++t)
    if (y_observed[t] && !y.row(t).allFinite())
      throw ValidationError("observed increment " + std::to_string(t) +
                            " has non-finite values");
  if (has_grid) {
    if (coords.rows() != count + 2 || coords.cols() != 2)
      throw ValidationError("grid coordinates must have n + 2 rows");
    if (static_cast<int>(coords_observed.size()) != count + 2)
      throw ValidationError("grid observed mask length mismatch");
    bool any = false;
    for (bool b : coords_observed) any = any || b;
    if (!any) throw ValidationError("grid has no observed coordinates");
  }
}

// ---------------------------------------------------------------------
// Stateless Gibbs pieces.

Matrix prob_field_from_omega(const Matrix& omega) {
  const int n = static_cast<int>(omega.rows());
  const int K = static_cast<int>(omega.cols()) + 1;
  Matrix pi(n, K);
  for (int t = 0; t < n; ++t)
    pi.row(t) = softmax_reduced(omega.row(t).transpose()).transpose();
  return pi;
}

std::vector<int> draw_labels(const Matrix& y,
                             const std::vector<bool>& usable,
                             const Matrix& pi, const MixtureParams& mixture,
                             RngStream& rng) {
  const int n = static_cast<int>(pi.rows());
  const int K = static_cast<int>(pi.cols());
  if (mixture.K() != K) throw Error("mixture size does not match field");
  mixture.validate();

  struct Comp {
    Mat2 cov;
    double a, b, c, det;
  };
  std::vector<Comp> comps(K);
  for (int k = 0; k < K; ++k) {
    const Mat2& cv = mixture.omega_cov[k];
    comps[k] = {cv, cv(0, 0), cv(0, 1), cv(1, 1),
                cv(0, 0) * cv(1, 1) - cv(0, 1) * cv(0, 1)};
  }

  std::vector<int> z(n, -1);
  Vector logw(K), w(K);
  for (int t = 0; t < n; ++t) {
    if (!usable[t]) continue;
    for (int k = 0; k < K; ++k) {
      const double p = pi(t, k);
      double lw = p > 0.0 ? std::log(p) : kNegInf;
      const Comp& cm = comps[k];
      const double d0 = y(t, 0) - mixture.xi[k][0];
      const double d1 = y(t, 1) - mixture.xi[k][1];
      const double quad =
          (cm.c * d0 * d0 - 2.0 * cm.b * d0 * d1 + cm.a * d1 * d1) / cm.det;
      lw += -kLog2Pi - 0.5 * std::log(cm.det) - 0.5 * quad;
      logw[k] = lw;
    }
    const double top = logw.maxCoeff();
    if (top == kNegInf)
      throw Error("all label weights vanished at index " + std::to_string(t));
    for (int k = 0; k < K; ++k) w[k] = std::exp(logw[k] - top);
    z[t] = static_cast<int>(rng.categorical(w));
  }
  return z;
}

MixtureParams draw_mixture(const Matrix& y, const std::vector<bool>& usable,
                           const std::vector<int>& z,
                           const MixtureParams& current,
                           const Priors& priors, RngStream& rng) {
  const int K = current.K();
  MixtureParams next = current;
  const Mat2 v0_inv = priors.xi_cov.inverse();
  const Vec2 v0_inv_mean = v0_inv * priors.xi_mean;

  for (int k = 0; k < K; ++k) {
    int count = 0;
    Vec2 sum = Vec2::Zero();
    for (std::size_t t = 0; t < z.size(); ++t) {
      if (!usable[t] || z[t] != k) continue;
      ++count;
      sum += Vec2(y(t, 0), y(t, 1));
    }
    // xi_k | Omega_k: Gaussian with combined precision.
    const Mat2 om_inv = next.omega_cov[k].inverse();
    const Mat2 prec = v0_inv + count * om_inv;
    const Mat2 cov = prec.inverse();
    const Vec2 mean = cov * (v0_inv_mean + om_inv * sum);
    next.xi[k] = sample_mvn(mean, 0.5 * (cov + cov.transpose()), rng);

    // Omega_k | xi_k: inverse-Wishart with data scatter about xi_k.
    Mat2 scatter = Mat2::Zero();
    for (std::size_t t = 0; t < z.size(); ++t) {
      if (!usable[t] || z[t] != k) continue;
      const Vec2 d(y(t, 0) - next.xi[k][0], y(t, 1) - next.xi[k][1]);
      scatter += d * d.transpose();
    }
    next.omega_cov[k] = sample_inverse_wishart(
        priors.omega_iw_df + count, priors.omega_iw_scale + scatter, rng);
  }
  return next;
}

// ---------------------------------------------------------------------
// Chain.

Chain::Chain(ModelData data, ChainConfig config, Priors priors)
    : data_(std::move(data)),
      config_(config),
      priors_(priors),
      rng_(config.seed),
      adapt_(config.K >= 2 && data_.X.cols() >= 1
                 ? static_cast<int>(data_.X.cols()) * (config.K - 1) +
                       config.K + config.K * (config.K + 1) / 2
                 : 1,
             config.adapt_target, config.adapt_decay) {
  config_.validate();
  priors_.validate(config_.K);
  data_.validate();

  const int n = data_.n();
  const int K = config_.K;
  Eigen::LLT<Matrix> llt(priors_.sigma_scale(K));
  s_chol_ = llt.matrixL();

  usable_.assign(n, false);
  if (data_.has_grid) {
    st_.coords = data_.coords;
    init_impute_coords();
    for (int i = 0; i < n; ++i) refresh_increment(i);
    for (int g = 0; g < static_cast<int>(data_.coords_observed.size()); ++g)
      if (!data_.coords_observed[g]) missing_idx_.push_back(g);
    double mean_step = 0.0;
    for (int i = 0; i < n; ++i) mean_step += data_.y.row(i).norm();
    mean_step = n ? mean_step / n : 1.0;
    const double sd0 = std::max(1e-3, 0.5 * mean_step);
    coord_scales_.assign(missing_idx_.size(),
                         ScalarAdaptive(sd0, config_.adapt_target,
                                        config_.adapt_decay));
    std::fill(usable_.begin(), usable_.end(), true);
  } else {
    for (int i = 0; i < n; ++i) usable_[i] = data_.y_observed[i];
  }

  init_labels_kmeans();
  init_mixture_from_labels();

  gp_.beta = Vector::Zero(data_.p() * (K - 1));
  gp_.sigma_star = priors_.sigma_scale(K);
  gp_.decays = Vector::Constant(
      K, std::sqrt(priors_.decay_lower * priors_.decay_upper));
  theta_ = pack_theta(gp_);

  st_.omega = Matrix::Zero(n, K - 1);
  st_.pg = Matrix::Constant(n, K - 1, 0.25);
  rebuild_factor();
}

void Chain::init_impute_coords() {
  const int total = static_cast<int>(st_.coords.rows());
  int prev = -1;
  for (int g = 0; g < total; ++g) {
    if (!data_.coords_observed[g]) continue;
    if (prev < 0) {
      for (int j = 0; j < g; ++j) st_.coords.row(j) = st_.coords.row(g);
    } else {
      for (int j = prev + 1; j < g; ++j) {
        const double w =
            static_cast<double>(j - prev) / static_cast<double>(g - prev);
        st_.coords.row(j) =
            (1.0 - w) * st_.coords.row(prev) + w * st_.coords.row(g);
      }
    }
    prev = g;
  }
  if (prev < 0) throw ValidationError("grid has no observed coordinates");
  for (int j = prev + 1; j < total; ++j)
    st_.coords.row(j) = st_.coords.row(prev);
}

Vec2 Chain::increment_from_coords(const Matrix& coords, int i) const {
  const double bx = coords(i + 1, 0) - coords(i, 0);
  const double by = coords(i + 1, 1) - coords(i, 1);
  const double norm = std::sqrt(bx * bx + by * by);
  const double dx = coords(i + 2, 0) - coords(i + 1, 0);
  const double dy = coords(i + 2, 1) - coords(i + 1, 1);
  if (norm == 0.0) return Vec2(dx, dy);  // undefined heading: identity frame
  const double c = bx / norm, s = by / norm;
  return Vec2(c * dx + s * dy, -s * dx + c * dy);
}

void Chain::refresh_increment(int i) {
  data_.y.row(i) = increment_from_coords(st_.coords, i).transpose();
}

void Chain::init_labels_kmeans() {
  const int n = data_.n();
  const int K = config_.K;
  std::vector<int> rows;
  for (int t = 0; t < n; ++t)
    if (usable_[t]) rows.push_back(t);
  st_.z.assign(n, -1);
  if (static_cast<int>(rows.size()) < K) {
    for (std::size_t r = 0; r < rows.size(); ++r)
      st_.z[rows[r]] = static_cast<int>(r) % K;
    return;
  }

  // Features: step length plus the turning angle on the unit circle.
  Matrix f(rows.size(), 3);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double y1 = data_.y(rows[r], 0), y2 = data_.y(rows[r], 1);
    const double len = std::sqrt(y1 * y1 + y2 * y2);
    f(r, 0) = len;
    f(r, 1) = len > 0 ? y1 / len : 1.0;
    f(r, 2) = len > 0 ? y2 / len : 0.0;
  }
  for (int c = 0; c < 3; ++c) {
    const double mean = f.col(c).mean();
    double sd = std::sqrt((f.col(c).array() - mean).square().mean());
    if (!(sd > 0.0)) sd = 1.0;
    f.col(c) = (f.col(c).array() - mean) / sd;
  }

  RngStream km(derive_seed(config_.seed, 1001));
  const int nr = static_cast<int>(rows.size());
  Matrix centers(K, 3);
  centers.row(0) = f.row(static_cast<int>(km.integer(nr)));
  Vector d2 = (f.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int k = 1; k < K; ++k) {
    const double total = d2.sum();
    int pick = nr - 1;
    if (total > 0.0) {
      double u = km.uniform() * total;
      for (int r = 0; r < nr; ++r) {
        u -= d2[r];
        if (u <= 0.0) {
          pick = r;
          break;
        }
      }
    }
    centers.row(k) = f.row(pick);
    d2 = d2.cwiseMin(
        (f.rowwise() - centers.row(k)).rowwise().squaredNorm());
  }

  std::vector<int> assign(nr, 0);
  for (int pass = 0; pass < 25; ++pass) {
    for (int r = 0; r < nr; ++r) {
      int best = 0;
      double best_d = (f.row(r) - centers.row(0)).squaredNorm();
      for (int k = 1; k < K; ++k) {
        const double d = (f.row(r) - centers.row(k)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      assign[r] = best;
    }
    for (int k = 0; k < K; ++k) {
      Vector sum = Vector::Zero(3);
      int count = 0;
      for (int r = 0; r < nr; ++r)
        if (assign[r] == k) {
          sum += f.row(r).transpose();
          ++count;
        }
      if (count > 0) {
        centers.row(k) = (sum / count).transpose();
      } else {
        // Reseed an empty cluster at the point farthest from its center.
        int far = 0;
        double far_d = -1.0;
        for (int r = 0; r < nr; ++r) {
          const double d =
              (f.row(r) - centers.row(assign[r])).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = r;
          }
        }
        centers.row(k) = f.row(far);
      }
    }
  }
  for (int r = 0; r < nr; ++r) st_.z[rows[r]] = assign[r];
}

void Chain::init_mixture_from_labels() {
  const int K = config_.K;
  mix_.xi.assign(K, priors_.xi_mean);
  mix_.omega_cov.assign(K, Mat2::Identity());
  for (int k = 0; k < K; ++k) {
    int count = 0;
    Vec2 sum = Vec2::Zero();
    for (int t = 0; t < data_.n(); ++t)
      if (usable_[t] && st_.z[t] == k) {
        ++count;
        sum += Vec2(data_.y(t, 0), data_.y(t, 1));
      }
    if (count == 0) continue;
    const Vec2 mean = sum / count;
    mix_.xi[k] = mean;
    if (count >= 3) {
      Mat2 scatter = Mat2::Zero();
      for (int t = 0; t < data_.n(); ++t)
        if (usable_[t] && st_.z[t] == k) {
          const Vec2 d = Vec2(data_.y(t, 0), data_.y(t, 1)) - mean;
          scatter += d * d.transpose();
        }
      Mat2 cov = scatter / (count - 1);
      cov.diagonal().array() += 1e-6;
      if (cov.determinant() > 0.0) mix_.omega_cov[k] = cov;
    }
  }
}

Matrix Chain::mean_field(const Vector& beta) const {
  const int n = data_.n();
  const int p = data_.p();
  const int dim = config_.K - 1;
  Matrix mean(n, dim);
  for (int k = 0; k < dim; ++k)
    mean.col(k) = data_.X * beta.segment(k * p, p);
  return mean;
}

void Chain::recompute_resid() {
  const int dim = config_.K - 1;
  resid_ = st_.omega - mean_;
  Matrix raw = resid_;
  for (int t = 0; t < data_.n(); ++t) {
    const auto& nbrs = factor_.neighbor_sets[t];
    for (std::size_t i = 0; i < nbrs.size(); ++i)
      resid_.row(t) -= (factor_.cond_weights[t].middleCols(i * dim, dim) *
                        raw.row(nbrs[i]).transpose())
                           .transpose();
  }
}

void Chain::rebuild_gibbs_aux() {
  const int n = data_.n();
  const int dim = config_.K - 1;
  child_m_.resize(n);
  slot_prec_.resize(n, dim);
  for (int t = 0; t < n; ++t) {
    child_m_[t] = factor_.cond_cov_inv[t] * factor_.cond_weights[t];
    for (int k = 0; k < dim; ++k)
      slot_prec_(t, k) = factor_.cond_cov_inv[t](k, k);
  }
  for (int t = 0; t < n; ++t) {
    for (const auto& [c, pos] : factor_.child_sets[t]) {
      for (int k = 0; k < dim; ++k) {
        const int j = pos * dim + k;
        slot_prec_(t, k) +=
            factor_.cond_weights[c].col(j).dot(child_m_[c].col(j));
      }
    }
  }
}

void Chain::rebuild_factor() {
  factor_ = build_nngp_factor(data_.times, gp_, config_.m);
  theta_ = pack_theta(gp_);
  mean_ = mean_field(gp_.beta);
  rebuild_gibbs_aux();
  recompute_resid();
}

// ---------------------------------------------------------------------
// Updates.

void Chain::update_missing() {
  if (!data_.has_grid || missing_idx_.empty()) return;
  const int n = data_.n();
  for (std::size_t mi = 0; mi < missing_idx_.size(); ++mi) {
    const int g = missing_idx_[mi];
    const double sd = coord_scales_[mi].sd();
    const Vec2 cur = st_.coords.row(g).transpose();
    const Vec2 prop =
        cur + sd * Vec2(rng_.normal(), rng_.normal());
    const int lo = std::max(0, g - 2);
    const int hi = std::min(n - 1, g);
    double logr = 0.0;
    st_.coords.row(g) = prop.transpose();
    for (int i = lo; i <= hi; ++i) {
      if (st_.z[i] < 0) continue;
      logr += bvn_logdens(increment_from_coords(st_.coords, i),
                          mix_.xi[st_.z[i]], mix_.omega_cov[st_.z[i]]);
    }
    st_.coords.row(g) = cur.transpose();
    for (int i = lo; i <= hi; ++i) {
      if (st_.z[i] < 0) continue;
      logr -= bvn_logdens(increment_from_coords(st_.coords, i),
                          mix_.xi[st_.z[i]], mix_.omega_cov[st_.z[i]]);
    }
    const double alpha = logr >= 0.0 ? 1.0 : std::exp(logr);
    if (rng_.uniform() < alpha) {
      st_.coords.row(g) = prop.transpose();
      for (int i = lo; i <= hi; ++i) refresh_increment(i);
    }
    coord_scales_[mi].adapt(alpha);
  }
}

void Chain::update_labels() {
  st_.z = draw_labels(data_.y, usable_, prob_field(), mix_, rng_);
}

void Chain::update_mixture() {
  mix_ = draw_mixture(data_.y, usable_, st_.z, mix_, priors_, rng_);
}

void Chain::update_omega_field() {
  const int n = data_.n();
  const int dim = config_.K - 1;
  recompute_resid();
  const std::vector<int> perm = random_perm(dim, rng_);
  for (int t = 0; t < n; ++t) {
    const auto& kids = factor_.child_sets[t];
    for (int idx = 0; idx < dim; ++idx) {
      const int k = perm[idx];
      // Multinomial-logit offset: log-sum-exp of the other categories'
      // latent values (reference category contributes exp(0)).
      double mx = 0.0;
      for (int j = 0; j < dim; ++j)
        if (j != k && st_.omega(t, j) > mx) mx = st_.omega(t, j);
      double acc = std::exp(-mx);
      for (int j = 0; j < dim; ++j)
        if (j != k) acc += std::exp(st_.omega(t, j) - mx);
      const double c_off = mx + std::log(acc);
      if (!std::isfinite(c_off))
        throw Error("non-finite multinomial offset in omega update");

      const double x = st_.omega(t, k);
      double rho = 0.0, kappa = 0.0;
      if (st_.z[t] >= 0) {
        rho = pg_sample(1.0, x - c_off, rng_);
        st_.pg(t, k) = rho;
        kappa = st_.z[t] == k ? 0.5 : -0.5;
      }
      const double q = slot_prec_(t, k);
      double grad = -factor_.cond_cov_inv[t].row(k).dot(resid_.row(t));
      for (const auto& [c, pos] : kids)
        grad += child_m_[c].col(pos * dim + k).dot(resid_.row(c));
      const double prec = q + rho;
      const double mean = (q * x + grad + rho * c_off + kappa) / prec;
      const double xn = mean + rng_.normal() / std::sqrt(prec);
      const double delta = xn - x;
      st_.omega(t, k) = xn;
      resid_(t, k) += delta;
      for (const auto& [c, pos] : kids)
        resid_.row(c) -=
            delta * factor_.cond_weights[c].col(pos * dim + k).transpose();
    }
  }
}

int Chain::theta_dim() const {
  const int K = config_.K;
  return data_.p() * (K - 1) + K + K * (K + 1) / 2;
}

Vector Chain::pack_theta(const GPParams& g) const {
  const int K = config_.K;
  const int nb = static_cast<int>(g.beta.size());
  Vector theta(theta_dim());
  int idx = 0;
  for (int j = 0; j < nb; ++j) theta[idx++] = g.beta[j];
  for (int k = 0; k < K; ++k) {
    const double u = (g.decays[k] - priors_.decay_lower) /
                     (priors_.decay_upper - priors_.decay_lower);
    if (!(u > 0.0 && u < 1.0))
      throw Error("decay outside its prior support");
    theta[idx++] = std::log(u / (1.0 - u));
  }
  // M = S^{-1} sigma_star S^{-T}; parametrize its Cholesky factor.
  Matrix tmp = s_chol_.triangularView<Eigen::Lower>().solve(g.sigma_star);
  Matrix M =
      s_chol_.triangularView<Eigen::Lower>().solve(tmp.transpose());
  M = 0.5 * (M + M.transpose()).eval();
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success)
    throw Error("sigma_star is not positive definite under the prior scale");
  const Matrix L = llt.matrixL();
  for (int i = 0; i < K; ++i)
    for (int j = 0; j <= i; ++j)
      theta[idx++] = (i == j) ? std::log(L(i, i)) : L(i, j);
  return theta;
}

GPParams Chain::unpack_theta(const Vector& theta) const {
  const int K = config_.K;
  const int p = data_.p();
  if (!theta.allFinite()) throw Error("non-finite hyperparameter vector");
  GPParams g;
  int idx = 0;
  g.beta = theta.segment(0, p * (K - 1));
  idx += p * (K - 1);
  g.decays.resize(K);
  for (int k = 0; k < K; ++k)
    g.decays[k] = priors_.decay_lower +
                  (priors_.decay_upper - priors_.decay_lower) *
                      logistic(theta[idx++]);
  Matrix L = Matrix::Zero(K, K);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = theta[idx++];
      L(i, j) = (i == j) ? std::exp(std::min(v, 300.0)) : v;
    }
  Matrix M = L * L.transpose();
  Matrix sigma = s_chol_ * M * s_chol_.transpose();
  g.sigma_star = 0.5 * (sigma + sigma.transpose());
  return g;
}

double Chain::log_prior_theta(const Vector& theta) const {
  const int K = config_.K;
  const int p = data_.p();
  int idx = 0;
  double lp = 0.0;
  for (int j = 0; j < p * (K - 1); ++j) {
    const double d = theta[idx++] - priors_.beta_mean;
    lp -= 0.5 * d * d / priors_.beta_var;
  }
  const double width = priors_.decay_upper - priors_.decay_lower;
  for (int k = 0; k < K; ++k) {
    const double u = logistic(theta[idx++]);
    const double phi = priors_.decay_lower + width * u;
    const double jac =
        (phi - priors_.decay_lower) * (priors_.decay_upper - phi) / width;
    lp += jac > 0.0 ? std::log(jac) : kNegInf;
  }
  // Inverse-Wishart prior on sigma_star expressed through the Cholesky
  // factor L of M = S^{-1} sigma_star S^{-T} ~ IW(df, I): density terms
  // in |M| and tr(M^{-1}) plus the L->M and log-diagonal Jacobians.
  const double df = priors_.sigma_df(K);
  Matrix L = Matrix::Zero(K, K);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = theta[idx++];
      L(i, j) = (i == j) ? std::exp(std::min(v, 300.0)) : v;
    }
  double log_diag_sum = 0.0;
  for (int i = 0; i < K; ++i) {
    const double coef = (K - (i + 1) + 2) - (df + K + 1);
    log_diag_sum += coef * std::log(L(i, i));
  }
  const Matrix l_inv =
      L.triangularView<Eigen::Lower>().solve(Matrix::Identity(K, K));
  lp += log_diag_sum - 0.5 * l_inv.squaredNorm();
  return lp;
}

bool Chain::update_gp_hyper() {
  ++hyper_steps_;
  const Vector theta_prop = adapt_.propose(theta_, rng_);
  double alpha = 0.0;
  bool accepted = false;
  try {
    GPParams cand = unpack_theta(theta_prop);
    NNGPFactor cand_factor =
        build_nngp_factor(data_.times, cand, config_.m);
    const Matrix cand_mean = mean_field(cand.beta);
    const double lp_cand =
        nngp_logdensity(st_.omega, cand_mean, cand_factor) +
        log_prior_theta(theta_prop);
    const double lp_cur = nngp_logdensity(st_.omega, mean_, factor_) +
                          log_prior_theta(theta_);
    const double logr = lp_cand - lp_cur;
    alpha = logr >= 0.0 ? 1.0 : std::exp(logr);
    if (rng_.uniform() < alpha) {
      gp_ = std::move(cand);
      factor_ = std::move(cand_factor);
      mean_ = cand_mean;
      theta_ = theta_prop;
      rebuild_gibbs_aux();
      recompute_resid();
      accepted = true;
      ++hyper_accepts_;
    }
  } catch (const Error&) {
    // Proposal produced a degenerate model; treat as rejection but keep
    // the random stream aligned with the accept path.
    ++hyper_build_failures_;
    rng_.uniform();
    alpha = 0.0;
  }
  adapt_.adapt(theta_, alpha);
  return accepted;
}

void Chain::step() {
  update_missing();
  update_labels();
  update_mixture();
  update_omega_field();
  update_gp_hyper();
  ++iter_;
}

double Chain::current_loglik() const {
  return complete_loglik(data_.y, data_.y_observed, st_.z, mix_,
                         prob_field());
}

SampleStore Chain::run() {
  SampleStore store;
  store.K = config_.K;
  store.p = data_.p();
  store.T = data_.n();
  for (bool b : data_.y_observed) store.n_obs += b ? 1 : 0;
  const long long expected = config_.retained();
  store.mixture.reserve(expected);
  store.gp.reserve(expected);
  store.pi.reserve(expected);
  store.z.reserve(expected);
  store.loglik.reserve(expected);

  const long long tick =
      config_.progress ? std::max<long long>(1, config_.iters / 100) : 0;
  for (long long it = 0; it < config_.iters; ++it) {
    try {
      step();
    } catch (const Error& e) {
      throw Error("iteration " + std::to_string(it) + ": " + e.what());
    }
    if (it >= config_.burnin &&
        (it - config_.burnin + 1) % config_.thin == 0) {
      store.mixture.push_back(mix_);
      store.gp.push_back(gp_);
      Matrix pi = prob_field();
      store.loglik.push_back(complete_loglik(data_.y, data_.y_observed,
                                             st_.z, mix_, pi));
      store.pi.push_back(std::move(pi));
      store.z.push_back(st_.z);
      store.accept_trace.push_back(hyper_accept_rate());
    }
    if (tick && (it + 1) % tick == 0)
      std::fprintf(stderr, "progress: %3lld%% (%lld/%lld)\n",
                   (it + 1) * 100 / config_.iters, it + 1, config_.iters);
  }
  store.final_accept_rate = hyper_accept_rate();
  return store;
}

void Chain::init_from_prior() {
  const int K = config_.K;
  const int n = data_.n();
  for (int j = 0; j < gp_.beta.size(); ++j)
    gp_.beta[j] = rng_.normal(priors_.beta_mean, std::sqrt(priors_.beta_var));
  gp_.decays.resize(K);
  for (int k = 0; k < K; ++k)
    gp_.decays[k] = rng_.uniform(priors_.decay_lower, priors_.decay_upper);
  gp_.sigma_star = sample_inverse_wishart(priors_.sigma_df(K),
                                          priors_.sigma_scale(K), rng_);
  rebuild_factor();
  st_.omega = nngp_sample_prior(mean_, factor_, rng_);
  recompute_resid();

  for (int k = 0; k < K; ++k) {
    mix_.xi[k] = sample_mvn(priors_.xi_mean, priors_.xi_cov, rng_);
    mix_.omega_cov[k] = sample_inverse_wishart(priors_.omega_iw_df,
                                               priors_.omega_iw_scale, rng_);
  }
  const Matrix pi = prob_field();
  for (int t = 0; t < n; ++t) {
    if (!usable_[t]) {
      st_.z[t] = -1;
      continue;
    }
    st_.z[t] = static_cast<int>(rng_.categorical(pi.row(t).transpose()));
  }
  st_.pg = Matrix::Constant(n, K - 1, 0.25);
  resimulate_data();
}

void Chain::resimulate_data() {
  if (data_.has_grid)
    throw Error("data re-simulation requires increment-form data");
  const int K = config_.K;
  std::vector<Mat2> chol(K);
  for (int k = 0; k < K; ++k) {
    Eigen::LLT<Mat2> llt(mix_.omega_cov[k]);
    if (llt.info() != Eigen::Success)
      throw Error("component covariance not positive definite");
    chol[k] = llt.matrixL();
  }
  for (int t = 0; t < data_.n(); ++t) {
    if (!usable_[t] || st_.z[t] < 0) continue;
    const Vec2 z(rng_.normal(), rng_.normal());
    data_.y.row(t) =
        (mix_.xi[st_.z[t]] + chol[st_.z[t]] * z).transpose();
  }
}

void Chain::freeze_adaptation() {
  adapt_.freeze();
  for (auto& s : coord_scales_) s.freeze();
}

SampleStore run_chain(const ModelData& data, const ChainConfig& config,
                      const Priors& priors) {
  Chain chain(data, config, priors);
  return chain.run();
}

}  // namespace lngp
