#pragma once

#include "lngp/rng.hpp"

namespace lngp {

// Pólya-Gamma PG(b, c) exact sampling and moments. Only integer b is
// supported: a PG(b, c) variate is the sum of b independent PG(1, c)
// draws, each generated by the alternating-series accept/reject method on
// the tilted Jacobi density (exponential tail piece above the 0.64
// truncation point, truncated inverse-Gaussian body below it).

// Exact draw from PG(b, c). Throws Error unless b is a positive integer.
double pg_sample(double b, double c, RngStream& rng);

// E[PG(b, c)] = b/(2c) * tanh(c/2), with a series branch near c = 0
// (limit b/4). Throws Error for nonpositive b.
double pg_mean(double b, double c);

// Var[PG(b, c)] = b * (sinh(c) - c) / (4 c^3) * sech(c/2)^2, with a series
// branch near c = 0 (limit b/24). Throws Error for nonpositive b.
double pg_var(double b, double c);

}  // namespace lngp
