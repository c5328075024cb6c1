#pragma once

// Small-ball analytics: empirical (joint) small-ball proportions, the
// regular-variation data (rho, C_ell) and Laplace-transform constant zeta
// per squared-marginal family, the rate-constant bundles entering the CLT
// normalizations, the spectral dependence constant C_A for moving-average
// regressors, the Gaussian shift factor, and the predicted log small-ball
// expansion used for intercept-free slope comparisons.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqreg/seqspace.hpp"

namespace seqreg {

// Distribution families for X_s^2 (Table-row parametrizations):
//   UniformSq(1, b)  : X^2 uniform on (1, b)
//   Gamma(alpha,beta): shape alpha, rate beta
//   Exponential(eta) : rate eta
//   Weibull(alpha,beta): F(x) = 1 - exp(-beta x^alpha)
//   Pareto(theta,mu) : F(x) = 1 - (1 + x/theta)^(-mu)
//   ChiSq1           : X standard Gaussian
enum class DistFamily { UniformSq, Gamma, Exponential, Weibull, Pareto, ChiSq1 };

struct DistSpec {
  DistFamily family;
  double par1 = 0.0;
  double par2 = 0.0;

  static DistSpec uniform_sq(double b);
  static DistSpec gamma(double alpha, double beta);
  static DistSpec exponential(double eta);
  static DistSpec weibull(double alpha, double beta);
  static DistSpec pareto(double theta, double mu);
  static DistSpec chisq1();

  // Index of regular variation of F(1/x); strictly negative per family.
  double rho() const;
  // lim ell(x) in the Karamata representation F(1/x) = x^rho ell(x);
  // equals C_ell^{-2}.
  double ell_limit() const;
  // Laplace transform of X^2 and its log-derivative -L'(t)/L(t); defined
  // for Gamma, Exponential and ChiSq1.
  bool has_laplace() const;
  double laplace(double t) const;
  double neg_dlog_laplace(double t) const;

  std::string name() const;
};

DistSpec parse_dist(const std::string& text);  // e.g. "exp:1", "gamma:2,1.5", "chisq1"

struct KaramataData {
  double rho;
  double c_ell;                 // lim ell^{-1/2}
  std::optional<double> zeta;   // absent when the integral diverges
};

// Closed-form rho / C_ell; zeta from the closed form where the table
// provides one, absent for the divergent families. Requires p > 1.
KaramataData dist_constants(const DistSpec& dist, double p);

// zeta = -int_0^inf u^{-1/2p} L'(u)/L(u) du by adaptive quadrature, used
// as an independent route to the closed forms. Substitution u = s^q with
// q = 2p/(2p-1) removes the origin singularity; the tail is integrated on
// an exponential scale until negligible.
double zeta_quadrature(const DistSpec& dist, double p, double rel_tol = 1e-9);

enum class RateVariant { IID, GaussianDependent };

struct RateConstants {
  double rho = 0.0;
  double c_ell = 0.0;
  std::optional<double> zeta;
  double c_star = 0.0;    // C*
  double c_dstar = 0.0;   // C**
  RateVariant variant = RateVariant::IID;
  double c_a = 1.0;       // spectral constant; 1 under independence
};

// C_A = [ (1/2pi) int_0^{2pi} |sum_j a_j e^{ijx}|^{1/p} dx ]^p.
double spectral_constant(std::span<const double> ma_coeffs, double p,
                         double rel_tol = 1e-9);

// Bundles (rho, C_ell, zeta, C*, C**, C_A) for the requested variant. The
// GaussianDependent variant requires ChiSq1 marginals (standard Gaussian
// X_s) and square-summable ma_coeffs; IID sets C_A = 1. lambda enters the
// downstream normalizations, not the bundle; validated positive here.
RateConstants rate_constants(const DistSpec& dist, double p, double lambda,
                             RateVariant variant,
                             std::span<const double> ma_coeffs = {});

// Fraction of sample points whose weighted distance to x is <= lambda.
double empirical_small_ball(const std::vector<SeqPoint>& sample, const SeqPoint& x,
                            const BandwidthSchedule& sched);

// Fraction of index pairs (t, t+lag) with both points inside the
// ellipsoid; diagnostic for the joint small-ball condition.
double empirical_joint_small_ball(const std::vector<SeqPoint>& series,
                                  const SeqPoint& x, const BandwidthSchedule& sched,
                                  std::size_t lag);

// exp(-1/2 sum_j z_j^2 / gamma_j): the shifted-vs-centered equivalence
// factor for a diagonal Gaussian covariance.
double gaussian_shift_factor(SeqView z, std::span<const double> gamma_diag);

// Two-term expansion of log phi_x(h lambda) up to an additive constant:
//   ((1+2 rho p)/(2p-1)) log(lambda h) - C** (lambda h)^{-2/(2p-1)}       (IID)
//   ((1-p)/(2p-1)) log(lambda h) - C** (C_A lambda h)^{-2/(2p-1)} (Gaussian)
// Intended for slope/difference comparisons only.
double predicted_log_small_ball(double h, const RateConstants& consts, double lambda,
                                double p);

}  // namespace seqreg
