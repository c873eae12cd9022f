#include "lngp/logitn.hpp"

#include <cmath>

namespace lngp {

void ProbField::validate() const {
  for (int t = 0; t < T(); ++t) {
    double sum = 0.0;
    for (int k = 0; k < K(); ++k) {
      const double p = pi(t, k);
      if (!(p >= 0.0))
        throw Error("probability field has a negative or NaN entry at row " +
                    std::to_string(t));
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw Error("probability field row " + std::to_string(t) +
                  " sums to " + std::to_string(sum));
  }
}

Vector softmax_full(const Vector& gamma) {
  if (gamma.size() == 0) throw Error("softmax of an empty vector");
  const double top = gamma.maxCoeff();
  if (std::isnan(top)) throw Error("softmax input contains NaN");
  Vector p(gamma.size());
  double sum = 0.0;
  for (int k = 0; k < gamma.size(); ++k) {
    p[k] = std::exp(gamma[k] - top);
    sum += p[k];
  }
  p /= sum;
  // Flush denormal-scale mass and renormalize so downstream categorical
  // draws never see subnormal weights.
  bool flushed = false;
  for (int k = 0; k < p.size(); ++k)
    if (p[k] < 1e-300) {
      p[k] = 0.0;
      flushed = true;
    }
  if (flushed) p /= p.sum();
  return p;
}

Vector gamma_to_omega(const Vector& gamma) {
  const int K = static_cast<int>(gamma.size());
  if (K < 2) throw Error("gamma_to_omega needs at least 2 entries");
  return gamma.head(K - 1).array() - gamma[K - 1];
}

Vector softmax_reduced(const Vector& omega) {
  Vector gamma(omega.size() + 1);
  gamma.head(omega.size()) = omega;
  gamma[omega.size()] = 0.0;
  return softmax_full(gamma);
}

double logratio_cov(int i, int j, int k, int l, double dt,
                    const GPParams& params) {
  const int K = params.K();
  for (int idx : {i, j, k, l})
    if (idx < 0 || idx >= K)
      throw Error("logratio_cov index out of range");
  if (i == k || j == l) return 0.0;
  const Matrix a_star = symmetric_sqrt(params.sigma_star);
  Vector corr(K);
  for (int d = 0; d < K; ++d) corr[d] = expo_corr(dt, params.decays[d]);
  const Matrix g = a_star * corr.asDiagonal() * a_star.transpose();
  return g(i, j) - g(i, l) - g(k, j) + g(k, l);
}

std::vector<double> logratio_corr_curve(int i, int j, int k, int l,
                                        const std::vector<double>& lags,
                                        const GPParams& params) {
  const double tau0 = logratio_cov(i, j, k, l, 0.0, params);
  if (tau0 == 0.0)
    throw Error("log-ratio covariance at lag 0 is zero; curve undefined");
  std::vector<double> curve;
  curve.reserve(lags.size());
  for (double dt : lags)
    curve.push_back(logratio_cov(i, j, k, l, dt, params) / tau0);
  return curve;
}

Matrix independence_structure(const Vector& a) {
  const int K = static_cast<int>(a.size());
  if (K < 2) throw Error("independence_structure needs at least 2 entries");
  if (!(a.minCoeff() > 0.0))
    throw Error("independence_structure needs positive variances");
  Matrix out = Matrix::Constant(K - 1, K - 1, a[K - 1]);
  for (int k = 0; k < K - 1; ++k) out(k, k) += a[k];
  return out;
}

}  // namespace lngp
