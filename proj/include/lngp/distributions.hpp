#pragma once

#include "lngp/common.hpp"
#include "lngp/rng.hpp"

namespace lngp {

// Standard normal density and CDF.
double norm_pdf(double x);
double norm_cdf(double x);

// Upper tail probability P(X > x) for X ~ chi-squared(df), via the
// regularized incomplete gamma function.
double chi2_sf(double x, double df);

// log N(x | mean, cov) for a general SPD covariance (Cholesky-based).
double mvn_logdensity(const Vector& x, const Vector& mean, const Matrix& cov);

// Draw from N(mean, cov).
Vector sample_mvn(const Vector& mean, const Matrix& cov, RngStream& rng);

// Wishart(df, scale) via the Bartlett construction: W = S T T' S' with
// S = chol(scale), T lower triangular, T_ii^2 ~ chi^2(df-i+1) and
// off-diagonals standard normal. Requires df > dim - 1.
Matrix sample_wishart(double df, const Matrix& scale, RngStream& rng);

// Inverse-Wishart(df, scale): inverse of Wishart(df, scale^{-1}).
Matrix sample_inverse_wishart(double df, const Matrix& scale, RngStream& rng);

}  // namespace lngp
