#include "lngp/gpcore.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstring>
#include <unordered_map>

namespace lngp {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// Cholesky with jitter retry; returns the lower factor.
Matrix robust_cholesky(const Matrix& mat, const char* what) {
  Eigen::LLT<Matrix> llt(mat);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  const double jitters[] = {1e-10, 1e-8};
  for (double j : jitters) {
    Matrix bumped = mat;
    bumped.diagonal().array() += j;
    llt.compute(bumped);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw Error(std::string("Cholesky failed for ") + what +
              " (matrix numerically singular)");
}

std::int64_t bit_key(double x) {
  std::int64_t k;
  std::memcpy(&k, &x, sizeof k);
  return k;
}

}  // namespace

void GPParams::validate() const {
  const int k = K();
  if (k < 2) throw Error("sigma_star must be at least 2x2");
  if (sigma_star.cols() != k) throw Error("sigma_star must be square");
  if ((sigma_star - sigma_star.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * (1.0 + sigma_star.cwiseAbs().maxCoeff()))
    throw Error("sigma_star must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma_star,
                                           Eigen::EigenvaluesOnly);
  const double max_eig = es.eigenvalues().maxCoeff();
  if (!(es.eigenvalues().minCoeff() > 1e-12 * max_eig))
    throw Error("sigma_star must be positive definite");
  if (decays.size() != k)
    throw Error("decays must have one entry per category");
  if (!(decays.minCoeff() > 0.0))
    throw Error("decays must be strictly positive");
  if (beta.size() % (k - 1) != 0)
    throw Error("beta length must be a multiple of K-1");
}

double expo_corr(double dt, double phi) {
  if (!(phi > 0.0)) throw Error("correlation decay must be positive");
  if (dt < 0.0) throw Error("time lag must be nonnegative");
  return std::exp(-phi * dt);
}

Matrix symmetric_sqrt(const Matrix& sigma_star) {
  if (sigma_star.rows() != sigma_star.cols())
    throw Error("symmetric_sqrt needs a square matrix");
  if ((sigma_star - sigma_star.transpose()).cwiseAbs().maxCoeff() >
      1e-8 * (1.0 + sigma_star.cwiseAbs().maxCoeff()))
    throw Error("symmetric_sqrt needs a symmetric matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma_star);
  if (es.info() != Eigen::Success)
    throw Error("eigendecomposition failed in symmetric_sqrt");
  const double trace = sigma_star.trace();
  const double floor = 1e-12 * std::abs(trace);
  Vector vals = es.eigenvalues();
  for (int i = 0; i < vals.size(); ++i) {
    if (vals[i] < -1e-8 * std::abs(trace))
      throw Error("symmetric_sqrt needs a positive semidefinite matrix");
    if (vals[i] < floor) vals[i] = floor;
  }
  return es.eigenvectors() * vals.cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

Matrix reduce_A(const Matrix& a_star) {
  const int K = static_cast<int>(a_star.rows());
  if (K < 2) throw Error("reduce_A needs at least 2 rows");
  Matrix a(K - 1, a_star.cols());
  for (int i = 0; i < K - 1; ++i)
    a.row(i) = a_star.row(i) - a_star.row(K - 1);
  return a;
}

Matrix omega_cross_cov(double dt, const GPParams& params) {
  const Matrix a = reduce_A(symmetric_sqrt(params.sigma_star));
  Vector corr(params.decays.size());
  for (int d = 0; d < corr.size(); ++d)
    corr[d] = expo_corr(dt, params.decays[d]);
  return a * corr.asDiagonal() * a.transpose();
}

std::vector<std::vector<int>> build_neighbor_sets(int T, int m) {
  if (T < 1) throw Error("neighbor sets need T >= 1");
  if (m < 1) throw Error("neighbor sets need m >= 1");
  std::vector<std::vector<int>> sets(T);
  for (int t = 0; t < T; ++t) {
    const int count = std::min(m, t);
    sets[t].reserve(count);
    for (int j = 1; j <= count; ++j) sets[t].push_back(t - j);
  }
  return sets;
}

void NNGPFactor::check_field(const Matrix& field) const {
  if (field.rows() != T || field.cols() != dim)
    throw Error("field shape " + std::to_string(field.rows()) + "x" +
                std::to_string(field.cols()) + " does not match factor " +
                std::to_string(T) + "x" + std::to_string(dim));
}

NNGPFactor build_nngp_factor(const Vector& times, const GPParams& params,
                             int m) {
  params.validate();
  const int T = static_cast<int>(times.size());
  if (T < 1) throw Error("factor needs at least one time");
  for (int t = 1; t < T; ++t)
    if (!(times[t] > times[t - 1]))
      throw Error("factor times must be strictly increasing");

  const int K = params.K();
  const int dim = K - 1;
  const Matrix a = reduce_A(symmetric_sqrt(params.sigma_star));

  // Cross-covariance by lag. For the exponential kernel the block depends
  // only on |dt| and is symmetric, so one matrix serves both orderings of
  // a pair; a cache keyed on the lag keeps regular grids cheap.
  std::unordered_map<std::int64_t, Matrix> cache;
  auto cross = [&](double dt) -> const Matrix& {
    auto [it, fresh] = cache.try_emplace(bit_key(dt));
    if (fresh) {
      Vector corr(K);
      for (int d = 0; d < K; ++d) corr[d] = expo_corr(dt, params.decays[d]);
      it->second = a * corr.asDiagonal() * a.transpose();
    }
    return it->second;
  };
  const Matrix c0 = cross(0.0);

  // On an evenly spaced grid every index past m conditions on the same
  // lag pattern, so its weights and conditional covariance can be reused.
  bool regular = T >= 2;
  if (regular) {
    const double step = times[1] - times[0];
    for (int t = 2; t < T && regular; ++t)
      regular = std::abs((times[t] - times[t - 1]) - step) <= 1e-9 * step;
  }

  NNGPFactor factor;
  factor.T = T;
  factor.dim = dim;
  factor.neighbor_sets = build_neighbor_sets(T, m);
  factor.child_sets.resize(T);
  factor.cond_weights.resize(T);
  factor.cond_cov.resize(T);
  factor.cond_cov_inv.resize(T);
  factor.cond_chol.resize(T);
  factor.log_det = 0.0;

  double shared_log_det = 0.0;
  for (int t = 0; t < T; ++t) {
    const auto& nbrs = factor.neighbor_sets[t];
    const int q = static_cast<int>(nbrs.size());
    for (int j = 0; j < q; ++j)
      factor.child_sets[nbrs[j]].emplace_back(t, j);

    if (regular && t > m) {
      factor.cond_weights[t] = factor.cond_weights[m];
      factor.cond_cov[t] = factor.cond_cov[m];
      factor.cond_cov_inv[t] = factor.cond_cov_inv[m];
      factor.cond_chol[t] = factor.cond_chol[m];
      factor.log_det += shared_log_det;
      continue;
    }

    Matrix f;
    if (q == 0) {
      factor.cond_weights[t] = Matrix(dim, 0);
      f = c0;
    } else {
      Matrix c_nn(q * dim, q * dim);
      Matrix c_tn(dim, q * dim);
      for (int i = 0; i < q; ++i) {
        c_tn.middleCols(i * dim, dim) =
            cross(std::abs(times[t] - times[nbrs[i]]));
        for (int j = 0; j < q; ++j)
          c_nn.block(i * dim, j * dim, dim, dim) =
              cross(std::abs(times[nbrs[i]] - times[nbrs[j]]));
      }
      const Matrix chol_nn = robust_cholesky(c_nn, "neighbor covariance");
      // B = C_tN C_NN^{-1}, via two triangular solves.
      Matrix solved =
          chol_nn.triangularView<Eigen::Lower>().solve(c_tn.transpose());
      solved =
          chol_nn.transpose().triangularView<Eigen::Upper>().solve(solved);
      factor.cond_weights[t] = solved.transpose();
      f = c0 - factor.cond_weights[t] * c_tn.transpose();
      f = 0.5 * (f + f.transpose()).eval();
    }
    const Matrix chol_f = robust_cholesky(f, "conditional covariance");
    factor.cond_cov[t] = f;
    factor.cond_chol[t] = chol_f;
    Matrix inv = chol_f.triangularView<Eigen::Lower>().solve(
        Matrix::Identity(dim, dim));
    factor.cond_cov_inv[t] = inv.transpose() * inv;
    const double ld = 2.0 * chol_f.diagonal().array().log().sum();
    factor.log_det += ld;
    if (t == m) shared_log_det = ld;
  }
  return factor;
}

double nngp_logdensity(const Matrix& omega, const Matrix& mean,
                       const NNGPFactor& factor) {
  factor.check_field(omega);
  factor.check_field(mean);
  const int dim = factor.dim;
  double quad = 0.0;
  Vector resid(dim), scratch(dim);
  for (int t = 0; t < factor.T; ++t) {
    resid = (omega.row(t) - mean.row(t)).transpose();
    const auto& nbrs = factor.neighbor_sets[t];
    for (std::size_t i = 0; i < nbrs.size(); ++i)
      resid.noalias() -=
          factor.cond_weights[t].middleCols(i * dim, dim) *
          (omega.row(nbrs[i]) - mean.row(nbrs[i])).transpose();
    scratch.noalias() =
        factor.cond_chol[t].triangularView<Eigen::Lower>().solve(resid);
    quad += scratch.squaredNorm();
  }
  return -0.5 * (factor.T * dim * kLog2Pi + factor.log_det + quad);
}

Matrix nngp_sample_prior(const Matrix& mean, const NNGPFactor& factor,
                         RngStream& rng) {
  factor.check_field(mean);
  const int dim = factor.dim;
  Matrix omega(factor.T, dim);
  Vector mu(dim), z(dim);
  for (int t = 0; t < factor.T; ++t) {
    mu = mean.row(t).transpose();
    const auto& nbrs = factor.neighbor_sets[t];
    for (std::size_t i = 0; i < nbrs.size(); ++i)
      mu.noalias() +=
          factor.cond_weights[t].middleCols(i * dim, dim) *
          (omega.row(nbrs[i]) - mean.row(nbrs[i])).transpose();
    for (int k = 0; k < dim; ++k) z[k] = rng.normal();
    omega.row(t) =
        (mu + factor.cond_chol[t].triangularView<Eigen::Lower>() * z)
            .transpose();
  }
  return omega;
}

}  // namespace lngp
