#pragma once

#include <cstdint>
#include <vector>

#include "lngp/common.hpp"
#include "lngp/gpcore.hpp"

namespace lngp {

// Per-component bivariate-normal emission parameters.
struct MixtureParams {
  std::vector<Vec2> xi;        // component means
  std::vector<Mat2> omega_cov; // component covariances, SPD

  int K() const { return static_cast<int>(xi.size()); }
  void validate() const;
};

// Prior specification. The component covariances and sigma_star carry
// inverse-Wishart priors; decays are uniform on an interval; the mean
// parameters are Gaussian (beta entries i.i.d.).
struct Priors {
  Vec2 xi_mean = Vec2::Zero();
  Mat2 xi_cov = Mat2::Identity() * 100.0;
  double omega_iw_df = 3.0;
  Mat2 omega_iw_scale = Mat2::Identity();
  double decay_lower = 0.3;
  double decay_upper = 6.0;
  double beta_mean = 0.0;
  double beta_var = 100.0;
  double sigma_star_iw_df = 0.0;  // 0 means "use K + 1"
  Matrix sigma_star_iw_scale;     // empty means "use I_K"

  static Priors defaults(int K);
  void validate(int K) const;
  double sigma_df(int K) const {
    return sigma_star_iw_df > 0.0 ? sigma_star_iw_df : K + 1.0;
  }
  Matrix sigma_scale(int K) const {
    return sigma_star_iw_scale.size() > 0
               ? sigma_star_iw_scale
               : Matrix(Matrix::Identity(K, K));
  }
};

// MCMC run lengths and adaptation settings.
struct ChainConfig {
  int K = 3;
  int m = 10;
  long long iters = 50000;
  long long burnin = 10000;
  long long thin = 10;
  std::uint64_t seed = 1;
  double adapt_target = 0.234;
  double adapt_decay = 0.6;
  bool progress = false;  // 1% progress ticks on stderr

  long long retained() const { return (iters - burnin) / thin; }
  void validate() const;
};

// One dataset in increment form, optionally backed by planar grid
// coordinates (which enables imputation of missing positions).
//
// y row t is the increment at model time times[t]; y_observed marks rows
// derivable from genuinely observed fixes. In grid mode, coords has
// n + 2 rows and increment t is built from coords rows (t, t+1, t+2);
// rows with coords_observed false are unknown positions the sampler
// imputes.
struct ModelData {
  Vector times;  // strictly increasing, length n
  Matrix y;      // n x 2, NaN rows where not observed
  std::vector<bool> y_observed;
  Matrix X;      // n x p design for the latent mean

  bool has_grid = false;
  Matrix coords;  // (n+2) x 2 when has_grid
  std::vector<bool> coords_observed;

  int n() const { return static_cast<int>(times.size()); }
  int p() const { return static_cast<int>(X.cols()); }
  void validate() const;
};

// Latent MCMC state.
struct LatentState {
  std::vector<int> z;  // labels, 0-based; -1 where no label is defined
  Matrix omega;        // n x (K-1) reduced field
  Matrix pg;           // n x (K-1) Polya-Gamma auxiliaries, positive
  Matrix coords;       // current coordinates incl. imputed (grid mode)
};

}  // namespace lngp
