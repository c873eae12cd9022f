#include "lngp/pg.hpp"

#include <cmath>

#include "lngp/common.hpp"

namespace lngp {
namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTrunc = 0.64;  // split point of the two-piece envelope

double norm_logcdf(double x) {
  if (x > -37.0) return std::log(0.5 * std::erfc(-x * 0.70710678118654752440));
  // Deep lower tail: asymptotic expansion of Mills' ratio.
  const double x2 = x * x;
  return -0.5 * x2 - 0.5 * std::log(2.0 * kPi) - std::log(-x) +
         std::log1p(-1.0 / x2 + 3.0 / (x2 * x2));
}

// Piecewise coefficients a_n(x) of the alternating series for the tilted
// Jacobi density.
double series_coef(int n, double x) {
  const double half = n + 0.5;
  if (x > kTrunc) return kPi * half * std::exp(-0.5 * half * half * kPi * kPi * x);
  const double expnt = -1.5 * (std::log(0.5 * kPi) + std::log(x)) +
                       std::log(kPi * half) - 2.0 * half * half / x;
  return std::exp(expnt);
}

// Probability that the two-piece proposal lands in the exponential tail
// (x > kTrunc) given tilt z.
double tail_mass(double z) {
  const double fz = 0.125 * kPi * kPi + 0.5 * z * z;
  const double b = std::sqrt(1.0 / kTrunc) * (kTrunc * z - 1.0);
  const double a = -std::sqrt(1.0 / kTrunc) * (kTrunc * z + 1.0);
  const double x0 = std::log(fz) + fz * kTrunc;
  const double xb = x0 - z + norm_logcdf(b);
  const double xa = x0 + z + norm_logcdf(a);
  const double qdivp = 4.0 / kPi * (std::exp(xb) + std::exp(xa));
  return 1.0 / (1.0 + qdivp);
}

// Inverse-Gaussian IG(1/z, 1) truncated to (0, kTrunc).
double truncated_inv_gauss(double z, RngStream& rng) {
  double x = kTrunc + 1.0;
  if (kTrunc * z < 1.0) {  // mean above the truncation point
    double alpha = 0.0;
    do {
      double e1, e2;
      do {
        e1 = rng.exponential();
        e2 = rng.exponential();
      } while (e1 * e1 > 2.0 * e2 / kTrunc);
      x = kTrunc / ((1.0 + kTrunc * e1) * (1.0 + kTrunc * e1));
      alpha = std::exp(-0.5 * z * z * x);
    } while (rng.uniform() > alpha);
  } else {
    const double mu = 1.0 / z;
    while (x > kTrunc) {
      const double nu = rng.normal();
      const double y = nu * nu;
      const double mu_y = mu * y;
      x = mu + 0.5 * mu * mu_y -
          0.5 * mu * std::sqrt(4.0 * mu_y + mu_y * mu_y);
      if (rng.uniform() > mu / (mu + x)) x = mu * mu / x;
    }
  }
  return x;
}

// One exact draw of PG(1, c) = J*(1, |c|/2) / 4.
double pg1_sample(double c, RngStream& rng) {
  if (!std::isfinite(c)) throw Error("pg_sample needs a finite tilt");
  double z = 0.5 * std::abs(c);
  if (z > 350.0) z = 350.0;  // exp guards; unreachable for bounded fields
  const double rate = 0.125 * kPi * kPi + 0.5 * z * z;
  const double p_tail = tail_mass(z);
  for (;;) {
    const double x = (rng.uniform() < p_tail)
                         ? kTrunc + rng.exponential() / rate
                         : truncated_inv_gauss(z, rng);
    double s = series_coef(0, x);
    const double y = rng.uniform() * s;
    int n = 0;
    for (;;) {
      ++n;
      if (n % 2 == 1) {
        s -= series_coef(n, x);
        if (y <= s) return 0.25 * x;
      } else {
        s += series_coef(n, x);
        if (y > s) break;  // reject, draw a new proposal
      }
    }
  }
}

}  // namespace

double pg_sample(double b, double c, RngStream& rng) {
  if (!(b > 0.0)) throw Error("pg_sample needs positive b");
  const double rounded = std::round(b);
  if (std::abs(b - rounded) > 1e-9)
    throw Error("pg_sample supports integer b only");
  const int n = static_cast<int>(rounded);
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += pg1_sample(c, rng);
  return total;
}

double pg_mean(double b, double c) {
  if (!(b > 0.0)) throw Error("pg_mean needs positive b");
  const double a = std::abs(c);
  if (a < 1e-4) {
    const double c2 = c * c;
    return b * (0.25 - c2 / 48.0 + c2 * c2 / 480.0);
  }
  return b / (2.0 * c) * std::tanh(0.5 * c);
}

double pg_var(double b, double c) {
  if (!(b > 0.0)) throw Error("pg_var needs positive b");
  const double a = std::abs(c);
  if (a < 1e-4) {
    return b * (1.0 / 24.0 - c * c / 120.0);
  }
  const double sech = 1.0 / std::cosh(0.5 * c);
  return b * (std::sinh(a) - a) / (4.0 * a * a * a) * sech * sech;
}

}  // namespace lngp
