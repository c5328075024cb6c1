#include "seqreg/bandwidth.hpp"

#include <cmath>

#include "seqreg/errors.hpp"

namespace seqreg {

namespace {
constexpr double kInvE = 0.36787944117144232160;  // 1/e

double halley(double w, double y) {
  // Halley steps on f(w) = w e^w - y.
  for (int it = 0; it < 64; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - y;
    if (std::abs(f) <= 1e-14 * std::fmax(1.0, std::abs(y))) break;
    const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
    w -= f / denom;
  }
  return w;
}
}  // namespace

RateExponents::RateExponents(double beta, double p) {
  if (!(p > 0.5)) throw DomainError("RateExponents: p must exceed 1/2");
  j = 2.0 * beta + (1.0 - p) / (2.0 * p - 1.0);
  k = 2.0 / (2.0 * p - 1.0);
}

double lambert_w0(double y) {
  if (std::isnan(y)) throw DomainError("lambert_w0: nan argument");
  if (y < -kInvE) {
    // Tolerate representation noise at the branch point itself.
    if (y > -kInvE - 1e-15) return -1.0;
    throw DomainError("lambert_w0: argument below -1/e");
  }
  if (y == 0.0) return 0.0;
  if (std::abs(y) < 1e-8) return y * (1.0 - y);  // series, error O(y^3)

  double w;
  if (y < -kInvE + 1e-4) {
    // Branch-point expansion in q = sqrt(2(e y + 1)).
    const double q = std::sqrt(2.0 * (std::exp(1.0) * y + 1.0));
    w = -1.0 + q - q * q / 3.0 + 11.0 / 72.0 * q * q * q;
  } else if (y > std::exp(1.0)) {
    const double l1 = std::log(y);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  } else {
    w = y < 0.0 ? y * std::exp(-y) : 0.5 * std::log1p(y);
    if (w <= -1.0) w = -0.99;
  }
  return halley(w, y);
}

double lambert_w0_exp(double y) {
  if (y <= 700.0) return lambert_w0(std::exp(y));
  // Solve w + log w = y (w > 0 is huge); Newton in log-free form.
  double w = y - std::log(y);
  for (int it = 0; it < 64; ++it) {
    const double f = w + std::log(w) - y;
    const double step = f / (1.0 + 1.0 / w);
    w -= step;
    if (std::abs(step) <= 1e-15 * w) break;
  }
  return w;
}

namespace {
void check_aopt_args(std::size_t n, double beta, double p) {
  if (static_cast<double>(n) <= std::exp(1.0)) {
    throw DomainError("a_opt: n must exceed e");
  }
  if (!(beta >= 0.25)) throw DomainError("a_opt: beta must be >= 1/4");
  if (!(p > 1.0)) throw DomainError("a_opt: p must exceed 1");
}
}  // namespace

double a_opt_pointwise(std::size_t n, double beta, double p) {
  check_aopt_args(n, beta, p);
  const RateExponents e(beta, p);
  const double logn = std::log(static_cast<double>(n));
  const double loglogn = std::log(logn);
  const double r = e.k / e.j;
  // W argument (k/j) n^(k/j) handled in the log domain throughout.
  const double warg_log = std::log(r) + r * logn;
  const double w = lambert_w0_exp(warg_log);
  return (e.j * w - e.k * logn) / (e.j * e.k * loglogn);
}

double a_opt_uniform(std::size_t n, double beta, double p) {
  check_aopt_args(n, beta, p);
  const RateExponents e(beta, p);
  const double logn = std::log(static_cast<double>(n));
  const double loglogn = std::log(logn);
  const double r = e.k / e.j;
  const double reduced = logn - 2.0 * loglogn;  // entropy-adjusted balance target
  const double warg_log = std::log(r) + r * reduced;
  const double w = lambert_w0_exp(warg_log);
  return (e.j * w + 2.0 * e.k * loglogn - e.k * logn) / (e.j * e.k * loglogn);
}

double h_opt(std::size_t n, double a) {
  if (n < 3) throw DomainError("h_opt: n must be >= 3");
  return std::pow(std::log(static_cast<double>(n)), a);
}

}  // namespace seqreg
