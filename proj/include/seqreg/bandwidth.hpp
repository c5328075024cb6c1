#pragma once

// Lambert W (principal branch) and the optimal-bandwidth exponents: the
// pointwise a_opt solving the bias-variance balance exactly, its
// uniform-consistency analogue, and h_opt = (log n)^a.

#include <cstddef>

namespace seqreg {

// Exponents of the balance equation: j = 2*beta + (1-p)/(2p-1) drives the
// bias side, k = 2/(2p-1) the exponential variance side.
struct RateExponents {
  double j;
  double k;

  RateExponents(double beta, double p);
};

// W0(y) for y >= -1/e: solves x e^x = y with |x e^x - y| <= 1e-13 max(1,|y|).
// Halley iteration from a log-based guess for large y, a series start near
// zero (W ~ y - y^2 below 1e-8) and the square-root expansion near the
// branch point. Throws DomainError for y < -1/e.
double lambert_w0(double y);

// W0(e^y) evaluated without forming e^y; solves w + log w = y. Used when
// the balance argument exceeds floating range.
double lambert_w0_exp(double y);

// a_opt = [ j W((k/j) n^{k/j}) - k log n ] / (j k log log n). Satisfies the
// exact identity e^u + (j/k) u = log n with u = -k a_opt log log n.
// Requires n >= 3, beta >= 1/4, p > 1.
double a_opt_pointwise(std::size_t n, double beta, double p);

// Uniform-consistency analogue: the same balance with log n replaced by
// log n - 2 log log n (the entropy factor (log n)^2 moved into the
// variance), i.e. a_opt = [ j W((k/j) e^{(k/j)(log n - 2 log log n)})
// + 2k log log n - k log n ] / (j k log log n).
double a_opt_uniform(std::size_t n, double beta, double p);

// (log n)^a; n >= 3.
double h_opt(std::size_t n, double a);

}  // namespace seqreg
