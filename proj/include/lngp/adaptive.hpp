#pragma once

#include "lngp/common.hpp"
#include "lngp/rng.hpp"

namespace lngp {

// Global adaptive random-walk Metropolis state: a scalar log-scale plus a
// running estimate of the target's mean and covariance. The proposal is
//   theta' ~ N(theta, exp(log_scale) * cov),
// and after every proposal the triple (log_scale, mean, cov) moves by a
// Robbins-Monro step gamma_i = i^{-decay} toward the configured mean
// acceptance rate. Adaptation can be frozen, after which the kernel is a
// fixed Metropolis kernel.
class AdaptiveProposal {
 public:
  AdaptiveProposal(int dim, double target = 0.234, double decay = 0.6);

  Vector propose(const Vector& current, RngStream& rng) const;

  // Feed back the acceptance probability of the last proposal and the
  // state the chain is now at (post accept/reject).
  void adapt(const Vector& state, double alpha);

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  double log_scale() const { return log_scale_; }
  const Matrix& cov() const { return cov_; }
  double target() const { return target_; }

 private:
  int dim_;
  double target_;
  double decay_;
  double log_scale_ = 0.0;
  Vector mean_;
  Matrix cov_;
  long long iter_ = 0;
  bool frozen_ = false;
};

// Scalar variant used for per-coordinate imputation proposals: only the
// log of the proposal standard deviation adapts.
class ScalarAdaptive {
 public:
  explicit ScalarAdaptive(double initial_sd = 1.0, double target = 0.234,
                          double decay = 0.6);

  double sd() const { return std::exp(log_sd_); }
  void adapt(double alpha);
  void freeze() { frozen_ = true; }

 private:
  double target_;
  double decay_;
  double log_sd_;
  long long iter_ = 0;
  bool frozen_ = false;
};

}  // namespace lngp
