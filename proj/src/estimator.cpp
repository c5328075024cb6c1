#include "seqreg/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "seqreg/errors.hpp"

namespace seqreg {

std::optional<NWEstimate> nw_estimate(const RegressionSample& sample, const SeqPoint& x,
                                      const KernelSpec& kernel,
                                      const BandwidthSchedule& sched) {
  const std::size_t n = sample.y.size();
  if (n == 0 || sample.x.n != n) {
    throw DomainError("nw_estimate: sample empty or lengths disagree");
  }
  const auto inv_w = sched.inverse_weights(std::max(sample.x.tau, x.tau()));
  const double thr = sched.lambda * sched.lambda;

  double numer = 0.0, denom = 0.0;
  std::size_t in_window = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double d2 = weighted_norm_sq(sample.x.row(t), x.view(), inv_w);
    if (d2 <= thr) ++in_window;
    const double w = kernel_eval(kernel, std::sqrt(d2));
    if (w > 0.0) {
      numer += w * sample.y[t];
      denom += w;
    }
  }
  if (denom <= 0.0) return std::nullopt;

  NWEstimate est;
  est.value = numer / denom;
  est.numer = numer;
  est.denom_count = in_window;
  est.effective_n = static_cast<double>(in_window);
  return est;
}

ContractionCoeffs ContractionCoeffs::geometric(double c0, double gamma) {
  if (!(c0 >= 0.0)) throw DomainError("ContractionCoeffs: c0 must be >= 0");
  ContractionCoeffs c;
  c.c0 = c0;
  c.gamma = gamma;
  return c;
}

ContractionCoeffs ContractionCoeffs::explicit_list(std::vector<double> values) {
  for (double v : values) {
    if (!(v >= 0.0)) throw DomainError("ContractionCoeffs: coefficients must be >= 0");
  }
  ContractionCoeffs c;
  c.explicit_ = std::move(values);
  return c;
}

double ContractionCoeffs::coeff(std::size_t j) const {
  if (is_geometric()) return c0 * std::exp(-gamma * static_cast<double>(j));
  return j <= explicit_.size() ? explicit_[j - 1] : 0.0;
}

double ContractionCoeffs::sum() const {
  if (is_geometric()) {
    if (c0 == 0.0) return 0.0;
    if (!(gamma > 0.0)) throw NonSummable("geometric coefficients need gamma > 0");
    const double r = std::exp(-gamma);
    return c0 * r / (1.0 - r);
  }
  double s = 0.0;
  for (double v : explicit_) s += v;
  return s;
}

double bias_bound(double h, double beta, double lambda, const ContractionCoeffs& coeffs,
                  double p) {
  if (!(beta > 0.0) || beta > 1.0) throw DomainError("bias_bound: beta must be in (0,1]");
  if (!(h >= 0.0)) throw DomainError("bias_bound: h must be >= 0");
  if (!(lambda > 0.0)) throw DomainError("bias_bound: lambda must be > 0");
  if (h == 0.0) return 0.0;

  double series = 0.0;
  if (coeffs.is_geometric()) {
    if (coeffs.c0 == 0.0) return 0.0;
    if (!(coeffs.gamma > 0.0)) {
      throw NonSummable("bias_bound: geometric spec fails the ratio test");
    }
    const double q0 = std::exp(-coeffs.gamma);
    for (std::size_t j = 1;; ++j) {
      const double term =
          coeffs.coeff(j) * std::pow(static_cast<double>(j), p * beta);
      series += term;
      // Ratio bound: for i > j the term ratio is below
      // e^{-gamma} (1 + 1/j)^{p beta}; once < 1 the geometric tail closes it.
      const double q = q0 * std::pow(1.0 + 1.0 / static_cast<double>(j), p * beta);
      if (q < 1.0) {
        const double tail = term * q / (1.0 - q);
        if (tail <= 1e-12 * series) break;
      }
      if (j > 1'000'000) {
        throw NonSummable("bias_bound: series did not close within 1e6 terms");
      }
    }
  } else {
    for (std::size_t j = 1; j <= coeffs.length(); ++j) {
      series += coeffs.coeff(j) * std::pow(static_cast<double>(j), p * beta);
    }
  }
  return std::pow(h, beta) * std::pow(lambda, beta) * series;
}

double variance_approx(double sigma2, const XiEstimate& xi, std::size_t n, double phi) {
  if (n < 1) throw DomainError("variance_approx: n must be >= 1");
  if (!(phi > 0.0)) throw DomainError("variance_approx: phi must be > 0");
  return sigma2 * xi.xi2 / (static_cast<double>(n) * phi * xi.xi1 * xi.xi1);
}

double standardize_error(double mhat, double m_true, double bias, std::size_t n,
                         double rate_factor, double variance) {
  if (!(variance > 0.0)) throw DomainError("standardize_error: variance must be > 0");
  if (!(rate_factor > 0.0)) throw DomainError("standardize_error: rate factor must be > 0");
  return std::sqrt(static_cast<double>(n) * rate_factor / variance) *
         (mhat - m_true - bias);
}

double clt_rate_factor(double h, const RateConstants& consts, double lambda, double p) {
  if (!(h > 0.0) || !(lambda > 0.0)) {
    throw DomainError("clt_rate_factor: h and lambda must be > 0");
  }
  const double k = 2.0 / (2.0 * p - 1.0);
  if (consts.variant == RateVariant::IID) {
    const double poly = (1.0 + 2.0 * consts.rho * p) / (2.0 * p - 1.0);
    return std::pow(h, poly) *
           std::exp(-consts.c_dstar * std::pow(lambda * h, -k));
  }
  const double poly = (1.0 - p) / (2.0 * p - 1.0);
  return std::pow(h, poly) *
         std::exp(-consts.c_dstar * std::pow(consts.c_a * lambda * h, -k));
}

}  // namespace seqreg
