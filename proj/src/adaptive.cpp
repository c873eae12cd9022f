#include "lngp/adaptive.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace lngp {

AdaptiveProposal::AdaptiveProposal(int dim, double target, double decay)
    : dim_(dim), target_(target), decay_(decay) {
  if (dim < 1) throw Error("adaptive proposal needs dim >= 1");
  if (!(target > 0.0 && target < 1.0))
    throw Error("adaptive target must lie in (0,1)");
  if (!(decay > 0.5 && decay <= 1.0))
    throw Error("adaptive decay must lie in (0.5, 1]");
  mean_ = Vector::Zero(dim);
  // Start from a conservative isotropic proposal; the covariance estimate
  // takes over as draws accumulate.
  cov_ = Matrix::Identity(dim, dim) * (0.01 / dim);
}

Vector AdaptiveProposal::propose(const Vector& current,
                                 RngStream& rng) const {
  if (current.size() != dim_) throw Error("adaptive proposal dim mismatch");
  Matrix c = cov_;
  c.diagonal().array() += 1e-12;
  Eigen::LLT<Matrix> llt(c);
  if (llt.info() != Eigen::Success) {
    c.diagonal().array() += 1e-8;
    llt.compute(c);
    if (llt.info() != Eigen::Success)
      throw Error("adaptive proposal covariance became singular");
  }
  Vector z(dim_);
  for (int i = 0; i < dim_; ++i) z[i] = rng.normal();
  return current +
         std::exp(0.5 * log_scale_) * (Matrix(llt.matrixL()) * z);
}

void AdaptiveProposal::adapt(const Vector& state, double alpha) {
  if (frozen_) return;
  ++iter_;
  const double gamma = std::pow(static_cast<double>(iter_), -decay_);
  log_scale_ += gamma * (alpha - target_);
  if (log_scale_ > 20.0) log_scale_ = 20.0;
  if (log_scale_ < -20.0) log_scale_ = -20.0;
  const Vector delta = state - mean_;
  mean_ += gamma * delta;
  cov_ += gamma * (delta * delta.transpose() - cov_);
}

ScalarAdaptive::ScalarAdaptive(double initial_sd, double target,
                               double decay)
    : target_(target), decay_(decay), log_sd_(std::log(initial_sd)) {
  if (!(initial_sd > 0.0)) throw Error("proposal sd must be positive");
}

void ScalarAdaptive::adapt(double alpha) {
  if (frozen_) return;
  ++iter_;
  const double gamma = std::pow(static_cast<double>(iter_), -decay_);
  log_sd_ += 0.5 * gamma * (alpha - target_);
  if (log_sd_ > 20.0) log_sd_ = 20.0;
  if (log_sd_ < -20.0) log_sd_ = -20.0;
}

}  // namespace lngp
