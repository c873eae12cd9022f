#include "lngp/distributions.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace lngp {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// Regularized lower incomplete gamma P(a, x) by series expansion
// (for x < a + 1).
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 500; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by continued fraction
// (for x >= a + 1), Lentz's method.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) * 0.39894228040143267794;
}

double norm_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

double chi2_sf(double x, double df) {
  if (!(df > 0.0)) throw Error("chi2_sf needs positive degrees of freedom");
  if (x <= 0.0) return 1.0;
  const double a = 0.5 * df;
  const double xx = 0.5 * x;
  if (xx < a + 1.0) return 1.0 - gamma_p_series(a, xx);
  return gamma_q_cf(a, xx);
}

double mvn_logdensity(const Vector& x, const Vector& mean,
                      const Matrix& cov) {
  const int d = static_cast<int>(x.size());
  if (mean.size() != d || cov.rows() != d || cov.cols() != d)
    throw Error("mvn_logdensity shape mismatch");
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success)
    throw Error("mvn_logdensity: covariance not positive definite");
  const Matrix l = llt.matrixL();
  const Vector solved =
      l.triangularView<Eigen::Lower>().solve(x - mean);
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  return -0.5 * (d * kLog2Pi + log_det + solved.squaredNorm());
}

Vector sample_mvn(const Vector& mean, const Matrix& cov, RngStream& rng) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success)
    throw Error("sample_mvn: covariance not positive definite");
  Vector z(mean.size());
  for (int i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return mean + Matrix(llt.matrixL()) * z;
}

Matrix sample_wishart(double df, const Matrix& scale, RngStream& rng) {
  const int d = static_cast<int>(scale.rows());
  if (!(df > d - 1)) throw Error("Wishart needs df > dim - 1");
  Eigen::LLT<Matrix> llt(scale);
  if (llt.info() != Eigen::Success)
    throw Error("sample_wishart: scale not positive definite");
  Matrix t = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    t(i, i) = std::sqrt(rng.chi_squared(df - i));
    for (int j = 0; j < i; ++j) t(i, j) = rng.normal();
  }
  const Matrix f = Matrix(llt.matrixL()) * t;
  return f * f.transpose();
}

Matrix sample_inverse_wishart(double df, const Matrix& scale,
                              RngStream& rng) {
  const int d = static_cast<int>(scale.rows());
  Eigen::LLT<Matrix> llt(scale);
  if (llt.info() != Eigen::Success)
    throw Error("sample_inverse_wishart: scale not positive definite");
  const Matrix scale_inv =
      llt.solve(Matrix::Identity(d, d));
  const Matrix w = sample_wishart(df, 0.5 * (scale_inv + scale_inv.transpose()),
                                  rng);
  Eigen::LLT<Matrix> lltw(w);
  if (lltw.info() != Eigen::Success)
    throw Error("sample_inverse_wishart: degenerate Wishart draw");
  Matrix inv = lltw.solve(Matrix::Identity(d, d));
  return 0.5 * (inv + inv.transpose());
}

}  // namespace lngp
