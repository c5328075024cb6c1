#pragma once

// The sequence-space Nadaraya-Watson estimator: kernel-weighted response
// average over the weighted ellipsoid, plus the bias bound, the variance
// approximation and the CLT standardization around it.

#include <cstddef>
#include <optional>
#include <vector>

#include "seqreg/kernels.hpp"
#include "seqreg/seqspace.hpp"
#include "seqreg/smallball.hpp"

namespace seqreg {

// Row-major container of n regressor points with a common truncation.
struct PointMatrix {
  std::vector<double> data;
  std::size_t n = 0;
  std::size_t tau = 0;

  PointMatrix() = default;
  PointMatrix(std::size_t n_, std::size_t tau_)
      : data(n_ * tau_, 0.0), n(n_), tau(tau_) {}

  SeqView row(std::size_t t) const { return SeqView(data.data() + t * tau, tau); }
  double* mutable_row(std::size_t t) { return data.data() + t * tau; }
};

struct RegressionSample {
  enum class Origin { Static, Autoregressive };

  std::vector<double> y;
  PointMatrix x;
  Origin origin = Origin::Static;
};

struct NWEstimate {
  double value = 0.0;         // the estimate itself
  double numer = 0.0;         // kernel-weighted response sum (m2 numerator scale)
  std::size_t denom_count = 0;  // observations inside the ellipsoid
  double effective_n = 0.0;     // n * phi_hat proxy
};

// Kernel-weighted average of the responses. Empty result when every
// kernel weight vanishes; never divides by zero.
std::optional<NWEstimate> nw_estimate(const RegressionSample& sample, const SeqPoint& x,
                                      const KernelSpec& kernel,
                                      const BandwidthSchedule& sched);

// Contraction coefficients c_j (j >= 1), either the geometric family
// c_j = c0 e^{-gamma j} or an explicit finite list.
struct ContractionCoeffs {
  static ContractionCoeffs geometric(double c0, double gamma);
  static ContractionCoeffs explicit_list(std::vector<double> values);

  bool is_geometric() const { return explicit_.empty(); }
  double coeff(std::size_t j) const;  // c_j, j >= 1
  double sum() const;                 // sum_j c_j
  std::size_t length() const { return explicit_.size(); }

  double c0 = 0.0;
  double gamma = 0.0;
  std::vector<double> explicit_;
};

// h^beta lambda^beta sum_j c_j j^{p beta}, with the geometric tail bounded
// so the truncation error stays below 1e-12 of the sum. Throws NonSummable
// when the ratio test fails for the supplied coefficients.
double bias_bound(double h, double beta, double lambda, const ContractionCoeffs& coeffs,
                  double p);

// sigma^2 xi_2 / (n phi xi_1^2).
double variance_approx(double sigma2, const XiEstimate& xi, std::size_t n, double phi);

// sqrt(n rate_factor / variance) * (mhat - m_true - bias).
double standardize_error(double mhat, double m_true, double bias, std::size_t n,
                         double rate_factor, double variance);

// The normalization under the square root of the CLT statement:
// h^{(1+2 rho p)/(2p-1)} exp{-C** (lambda h)^{-2/(2p-1)}} for IID, with the
// Gaussian-dependent analogue h^{(1-p)/(2p-1)} exp{-C** (C_A lambda h)^{-2/(2p-1)}}.
double clt_rate_factor(double h, const RateConstants& consts, double lambda, double p);

}  // namespace seqreg
