#pragma once

#include <vector>

#include "lngp/adaptive.hpp"
#include "lngp/model.hpp"
#include "lngp/store.hpp"

namespace lngp {

// Stateless Gibbs pieces, exposed for direct testing. ------------------

// Draw labels. Rows with a usable y get weights prop. to
// pi_{t,k} * N2(y_t | xi_k, Omega_k); rows flagged unlabeled get -1.
// Computed in log space; throws Error if every weight underflows to zero.
std::vector<int> draw_labels(const Matrix& y,
                             const std::vector<bool>& usable,
                             const Matrix& pi, const MixtureParams& mixture,
                             RngStream& rng);

// One Gibbs scan of the emission parameters: xi_k | Omega_k (Gaussian)
// then Omega_k | xi_k (inverse-Wishart), per component, using rows with
// usable[t] && z[t] == k. Empty components reduce to prior draws.
MixtureParams draw_mixture(const Matrix& y, const std::vector<bool>& usable,
                           const std::vector<int>& z,
                           const MixtureParams& current,
                           const Priors& priors, RngStream& rng);

// Mixing probabilities from the reduced field: row t is
// softmax(omega_t, 0).
Matrix prob_field_from_omega(const Matrix& omega);

// The chain. ------------------------------------------------------------
//
// One full sweep is: update_missing (grid mode), update_labels,
// update_mixture, update_omega_field, update_gp_hyper. The GP
// hyperparameters (beta, decays, sigma_star) move as a single adaptive
// Metropolis block in an unconstrained parametrization (identity for
// beta, scaled logit for the decays, Cholesky-with-log-diagonal for
// sigma_star); everything else is Gibbs.
class Chain {
 public:
  Chain(ModelData data, ChainConfig config, Priors priors);

  // One full kernel sweep.
  void step();

  // Run iters sweeps honoring burnin/thin; returns the retained draws.
  SampleStore run();

  // Individual updates (public so tests can drive them in isolation).
  void update_missing();
  void update_labels();
  void update_mixture();
  void update_omega_field();
  bool update_gp_hyper();  // true on acceptance

  // Successive-conditional (prior-reproduction) testing support:
  // draw every parameter and latent from its prior, and re-draw the data
  // from the emission model given the current labels and mixture.
  void init_from_prior();
  void resimulate_data();
  void freeze_adaptation();

  // Accessors. After mutating gp() or state().omega externally, call
  // rebuild_factor() to re-sync caches.
  const ModelData& data() const { return data_; }
  const ChainConfig& config() const { return config_; }
  const Priors& priors() const { return priors_; }
  LatentState& state() { return st_; }
  const LatentState& state() const { return st_; }
  MixtureParams& mixture() { return mix_; }
  const MixtureParams& mixture() const { return mix_; }
  GPParams& gp() { return gp_; }
  const GPParams& gp() const { return gp_; }
  const NNGPFactor& factor() const { return factor_; }
  RngStream& rng() { return rng_; }
  Matrix prob_field() const { return prob_field_from_omega(st_.omega); }
  double hyper_accept_rate() const {
    return hyper_steps_ ? static_cast<double>(hyper_accepts_) / hyper_steps_
                        : 0.0;
  }
  long long hyper_reject_on_error() const { return hyper_build_failures_; }

  void rebuild_factor();

  // Complete-data log-likelihood of the current state over observed rows.
  double current_loglik() const;

 private:
  void init_impute_coords();
  void init_labels_kmeans();
  void init_mixture_from_labels();
  void refresh_increment(int i);          // recompute y row i from coords
  Vec2 increment_from_coords(const Matrix& coords, int i) const;
  Matrix mean_field(const Vector& beta) const;
  void recompute_resid();
  void rebuild_gibbs_aux();

  int theta_dim() const;
  Vector pack_theta(const GPParams& g) const;
  GPParams unpack_theta(const Vector& theta) const;
  double log_prior_theta(const Vector& theta) const;

  ModelData data_;
  ChainConfig config_;
  Priors priors_;
  RngStream rng_;

  MixtureParams mix_;
  GPParams gp_;
  LatentState st_;
  NNGPFactor factor_;
  Matrix mean_;   // n x (K-1), X * beta per slot
  Matrix resid_;  // cached conditional residuals of the omega field

  // Factor-dependent caches for the scalar Gibbs sweep.
  std::vector<Matrix> child_m_;  // per t: F_t^{-1} * B_t
  Matrix slot_prec_;             // n x (K-1) prior scalar precisions

  Vector theta_;  // unconstrained hyper block mirroring gp_
  AdaptiveProposal adapt_;
  std::vector<bool> usable_;      // rows that carry a label and emission
  std::vector<int> missing_idx_;  // grid indices needing imputation
  std::vector<ScalarAdaptive> coord_scales_;
  Matrix s_chol_;  // lower Cholesky of the sigma_star prior scale

  long long hyper_steps_ = 0;
  long long hyper_accepts_ = 0;
  long long hyper_build_failures_ = 0;
  long long iter_ = 0;
};

// Convenience wrapper matching the one-shot interface.
SampleStore run_chain(const ModelData& data, const ChainConfig& config,
                      const Priors& priors);

}  // namespace lngp
