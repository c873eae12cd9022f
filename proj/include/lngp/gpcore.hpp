#pragma once

#include <vector>

#include "lngp/common.hpp"
#include "lngp/rng.hpp"

namespace lngp {

// Hyperparameters of the latent Gaussian field. The K-variate factor
// process has one exponential-correlation decay per factor and a K x K SPD
// loading-generator sigma_star; the reduced (K-1)-variate field omega is
// driven by A = reduce_A(symmetric_sqrt(sigma_star)). beta holds the
// regression coefficients of the reduced mean, length p*(K-1) (the last
// category's coefficients are fixed at zero and not stored).
struct GPParams {
  Vector beta;
  Matrix sigma_star;
  Vector decays;

  int K() const { return static_cast<int>(sigma_star.rows()); }
  void validate() const;  // throws Error on violated constraints
};

// Exponential correlation exp(-phi*dt). Throws Error for phi <= 0 or dt < 0.
double expo_corr(double dt, double phi);

// Unique symmetric positive-semidefinite square root, via the spectral
// decomposition. Eigenvalues are floored at 1e-12 * trace to tolerate
// numerically semidefinite inputs; genuinely indefinite inputs are errors.
Matrix symmetric_sqrt(const Matrix& sigma_star);

// Drop to the (K-1)-dimensional contrast space: row i of the result is
// row i of a_star minus its last row.
Matrix reduce_A(const Matrix& a_star);

// Cross-covariance of the reduced field at lag dt:
//   A * diag(exp(-phi_d * dt)) * A'.
// At dt = 0 this is the within-time covariance of omega_t.
Matrix omega_cross_cov(double dt, const GPParams& params);

// Neighbor sets under temporal ordering: N(t) = {t-1, ..., max(0, t-m)},
// most recent first (0-based indices).
std::vector<std::vector<int>> build_neighbor_sets(int T, int m);

// Sparse sequential factorization of the reduced field's joint Gaussian:
// the joint density is approximated by prod_t p(omega_t | omega_{N(t)}),
// each conditional computed exactly from the cross-covariances. Equals the
// dense joint whenever m >= T-1.
struct NNGPFactor {
  int T = 0;
  int dim = 0;  // block dimension K-1
  std::vector<std::vector<int>> neighbor_sets;
  // child_sets[t] lists the later indices s whose neighbor set contains t,
  // paired with t's position within N(s); used by scalar Gibbs updates.
  std::vector<std::vector<std::pair<int, int>>> child_sets;
  std::vector<Matrix> cond_weights;  // B_t: dim x (|N(t)|*dim)
  std::vector<Matrix> cond_cov;      // F_t: dim x dim SPD
  std::vector<Matrix> cond_cov_inv;  // F_t^{-1}
  std::vector<Matrix> cond_chol;     // lower Cholesky of F_t
  double log_det = 0.0;              // sum_t log|F_t|

  void check_field(const Matrix& field) const;  // shape guard
};

// Build the factorization for blocks at the given strictly increasing
// times. Conditioning solves use a Cholesky of the neighbor covariance,
// retried with diagonal jitter 1e-10 then 1e-8 before failing.
NNGPFactor build_nngp_factor(const Vector& times, const GPParams& params,
                             int m);

// Joint log-density of the field under the factorization:
// sum_t log N(omega_t | mean_t + B_t(omega_N - mean_N), F_t).
double nngp_logdensity(const Matrix& omega, const Matrix& mean,
                       const NNGPFactor& factor);

// Ancestral draw omega_t ~ N(conditional mean, F_t), t = 0..T-1.
Matrix nngp_sample_prior(const Matrix& mean, const NNGPFactor& factor,
                         RngStream& rng);

}  // namespace lngp
