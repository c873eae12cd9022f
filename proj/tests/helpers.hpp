#pragma once

// Shared oracles and statistical utilities for the test suite. Everything
// here is deliberately written from first principles (no calls into the
// code paths under test) so the comparisons are independent.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "lngp/common.hpp"
#include "lngp/distributions.hpp"
#include "lngp/gpcore.hpp"
#include "lngp/rng.hpp"

namespace testutil {

using lngp::Matrix;
using lngp::Vector;

// Random SPD matrix Q diag(lambda) Q' with eigenvalues in [lo, hi].
inline Matrix random_spd(int dim, lngp::RngStream& rng, double lo = 0.2,
                         double hi = 5.0) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Vector lam(dim);
  for (int i = 0; i < dim; ++i) lam[i] = rng.uniform(lo, hi);
  return q * lam.asDiagonal() * q.transpose();
}

// Dense joint covariance of the reduced field at the given times, built
// directly from the loading root and scalar exponentials rather than via
// omega_cross_cov, so it can serve as an oracle for that function too.
inline Matrix dense_field_cov(const Vector& times, const lngp::GPParams& gp) {
  const int K = gp.K();
  const int dim = K - 1;
  const int T = static_cast<int>(times.size());
  const Matrix a_star = lngp::symmetric_sqrt(gp.sigma_star);
  Matrix a(dim, K);
  for (int i = 0; i < dim; ++i)
    a.row(i) = a_star.row(i) - a_star.row(K - 1);
  Matrix cov(T * dim, T * dim);
  for (int s = 0; s < T; ++s)
    for (int t = 0; t < T; ++t) {
      const double dt = std::abs(times[t] - times[s]);
      Vector corr(K);
      for (int d = 0; d < K; ++d) corr[d] = std::exp(-gp.decays[d] * dt);
      cov.block(s * dim, t * dim, dim, dim) =
          a * corr.asDiagonal() * a.transpose();
    }
  return cov;
}

// Row-major flatten of a T x dim field into a length T*dim vector,
// matching the block order of dense_field_cov.
inline Vector flatten_field(const Matrix& field) {
  Vector out(field.size());
  int idx = 0;
  for (int t = 0; t < field.rows(); ++t)
    for (int k = 0; k < field.cols(); ++k) out[idx++] = field(t, k);
  return out;
}

inline double mean_of(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) /
         static_cast<double>(x.size());
}

inline double var_of(const std::vector<double>& x) {
  const double m = mean_of(x);
  double acc = 0.0;
  for (double v : x) acc += (v - m) * (v - m);
  return acc / static_cast<double>(x.size() - 1);
}

// Standard error of the sample mean.
inline double se_mean(const std::vector<double>& x) {
  return std::sqrt(var_of(x) / static_cast<double>(x.size()));
}

// Standard error of the sample variance via fourth central moments.
inline double se_var(const std::vector<double>& x) {
  const double m = mean_of(x);
  const double n = static_cast<double>(x.size());
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = (v - m) * (v - m);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  return std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
}

// Kolmogorov-Smirnov distance between a sample and a CDF.
template <typename Cdf>
double ks_distance(std::vector<double> x, Cdf cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
  }
  return d;
}

// Standard normal quantile by bisection on the CDF (oracle-grade, slow).
inline double normal_quantile(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (lngp::norm_cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Chi-squared goodness-of-fit p-value for draws binned into equal-mass
// bins of a known distribution, given the bin upper edges (the last edge
// is +infinity implicitly).
inline double chi2_equal_mass_pvalue(const std::vector<double>& draws,
                                     const std::vector<double>& inner_edges) {
  const int bins = static_cast<int>(inner_edges.size()) + 1;
  std::vector<double> count(bins, 0.0);
  for (double v : draws) {
    int b = static_cast<int>(
        std::lower_bound(inner_edges.begin(), inner_edges.end(), v) -
        inner_edges.begin());
    count[b] += 1.0;
  }
  const double expect = static_cast<double>(draws.size()) / bins;
  double stat = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double d = count[b] - expect;
    stat += d * d / expect;
  }
  return lngp::chi2_sf(stat, bins - 1);
}

// One truncated-series draw of PG(1, c): (1/(2 pi^2)) * sum_k g_k /
// ((k + 1/2)^2 + c^2 / (4 pi^2)) with unit-exponential g_k.
inline double pg1_series_draw(double c, int terms, lngp::RngStream& rng) {
  const double shift = c * c / (4.0 * M_PI * M_PI);
  double acc = 0.0;
  for (int k = 0; k < terms; ++k) {
    const double den = (k + 0.5) * (k + 0.5) + shift;
    acc += rng.exponential() / den;
  }
  return acc / (2.0 * M_PI * M_PI);
}

}  // namespace testutil
