#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lngp/model.hpp"
#include "lngp/store.hpp"

namespace lngp {

// Synthetic-data scenario: a latent K-variate factor field on an even
// time grid covering (0, time_span], an intercept-plus-time design, and
// bivariate Gaussian emissions per component.
struct SimScenario {
  int T = 500;
  double time_span = 20.0;  // times are (i+1) * time_span / T
  GPParams gp;              // beta has length 2*(K-1): intercept and slope
  MixtureParams mixture;

  int K() const { return gp.K(); }
  Vector times() const;
  Matrix design() const;  // columns (1, t_i)
  void validate() const;

  // The reference three-component configuration used throughout the test
  // corpus: well-separated means, correlations 0 / 0.9 / -0.5, coupled
  // loading generator, decays (1, 0.8, 1.5), beta = (0,-5,3,-7).
  static SimScenario defaults(int T = 500);
};

// One simulated dataset plus the latent truth that generated it.
struct SimResult {
  Vector times;
  Matrix X;
  Matrix omega;  // T x (K-1) realized contrasts against the last category
  Matrix pi;     // T x K mixing probabilities
  std::vector<int> z;
  Matrix y;       // T x 2 rotated increments
  Matrix coords;  // (T+2) x 2 path reconstructed from (0,0) and (1,0)
};

// Exact draw from the scenario's generative model. The latent factors are
// Markov under exponential correlation, so each factor path is simulated
// by the O(T) autoregressive recursion.
SimResult simulate_dataset(const SimScenario& sc, std::uint64_t seed);

// Sum over rows with observed[t] && z[t] >= 0 of
//   log pi_{t, z_t} + log N2(y_t | xi_{z_t}, Omega_{z_t}).
// A vanishing probability at an assigned label yields -infinity.
double complete_loglik(const Matrix& y, const std::vector<bool>& observed,
                       const std::vector<int>& z,
                       const MixtureParams& mixture, const Matrix& pi);

// Integrated-classification-likelihood entry for one fitted chain. The
// MAP classification draw is the retained draw with the highest
// complete-data log-likelihood; `value` is that log-likelihood minus
// (nu/2) * log(n_obs). Reports list `printed` = -value and select its
// minimum, so larger `value` wins.
struct ICLEntry {
  int K = 0;
  int m = 0;
  double value = 0.0;
  double printed = 0.0;
  int map_index = -1;
  int nu = 0;  // 5K mixture + p(K-1) beta + K decays + K(K+1)/2 loading
};
ICLEntry icl_score(const SampleStore& store, int m);

// Posterior mean and pointwise quantile bands of the mixing
// probabilities; each matrix is T x K.
struct ProbBands {
  Matrix mean, lower, upper;
};
ProbBands probability_timeseries(const SampleStore& store, double lo = 0.025,
                                 double hi = 0.975);

// Density of the direction of a N2(mu, sigma) vector (projected normal),
// in closed form and overflow-safe for all inputs.
double projected_normal_density(double theta, const Vec2& mu,
                                const Mat2& sigma);

// Posterior predictive turning-angle density per component: the projected
// normal curve averaged over retained draws. Returns grid.size() x K.
Matrix angle_density(const SampleStore& store, const Vector& grid);

// Posterior predictive step-length density per component: Monte Carlo
// draws of ||y|| pooled across retained draws, smoothed by a Gaussian
// KDE reflected at zero. Returns grid.size() x K; mc_draws is the total
// pool size per component.
Matrix step_density(const SampleStore& store, const Vector& grid,
                    int mc_draws, std::uint64_t seed);

// Posterior summary of normalized log-ratio correlation curves for every
// unordered category pair (i < k): for each retained draw the lag-0
// normalized autocovariance curve of log(pi_i/pi_k).
struct LogRatioReport {
  std::vector<std::pair<int, int>> pairs;  // 0-based category pairs
  std::vector<double> lags;
  std::vector<Matrix> curves;  // per pair: lags.size() x 3 (mean, lo, hi)
};
LogRatioReport logratio_report(const SampleStore& store,
                               const std::vector<double>& lags,
                               double lo = 0.025, double hi = 0.975);

// Label alignment (reporting concern only; the kernel itself never
// relabels). A permutation maps new index -> old index: component k of
// the relabeled draw is component perm[k] of the original.
//
// Sequential running-mean relabeling: draw i is permuted to minimize the
// squared distance between its component means and the running mean of
// the already-relabeled draws. Returns the permutation applied per draw.
std::vector<std::vector<int>> relabel_store(SampleStore& store);

// Permutation aligning the store's posterior-mean component means to a
// reference set (perm[k] = store component closest to reference k under
// a best total matching).
std::vector<int> align_to_reference(const SampleStore& store,
                                    const std::vector<Vec2>& reference);

// Apply one permutation to every retained draw: mixture components, pi
// columns, labels, decays, the loading generator (conjugation), and the
// mean coefficients (re-expressed against the new reference category).
void apply_permutation(SampleStore& store, const std::vector<int>& perm);

}  // namespace lngp
