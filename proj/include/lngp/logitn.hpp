#pragma once

#include <vector>

#include "lngp/common.hpp"
#include "lngp/gpcore.hpp"

namespace lngp {

// Time-varying mixing probabilities: row t is the K-simplex point pi_t.
struct ProbField {
  Matrix pi;

  int T() const { return static_cast<int>(pi.rows()); }
  int K() const { return static_cast<int>(pi.cols()); }
  void validate() const;  // rows nonnegative and summing to 1 within 1e-12
};

// Softmax over the full K-vector gamma, computed with max-subtraction so
// it is exactly invariant to adding a constant to every entry. Entries
// below 1e-300 are flushed to zero and the row renormalized.
Vector softmax_full(const Vector& gamma);

// Contrast against the last category: omega_k = gamma_k - gamma_K.
Vector gamma_to_omega(const Vector& gamma);

// Softmax of (omega, 0): the inverse of the additive log-ratio transform
// with the last category as reference.
Vector softmax_reduced(const Vector& omega);

// Covariance of log-ratio contrasts of the latent K-variate field:
//   Cov(gamma_{t,i} - gamma_{t,k}, gamma_{t+dt,j} - gamma_{t+dt,l})
// expanded from the four entries of A* diag(exp(-phi_d dt)) A*'.
// Indices are 0-based; i == k or j == l gives exactly 0.
double logratio_cov(int i, int j, int k, int l, double dt,
                    const GPParams& params);

// logratio_cov normalized by its lag-0 value, evaluated per lag.
// Throws Error when the lag-0 covariance is zero.
std::vector<double> logratio_corr_curve(int i, int j, int k, int l,
                                        const std::vector<double>& lags,
                                        const GPParams& params);

// The within-time covariance of omega induced by K mutually independent
// latent components with variances a_1..a_K: diagonal a_k + a_K,
// off-diagonal a_K. Serves as the oracle for independence checks.
Matrix independence_structure(const Vector& a);

}  // namespace lngp
