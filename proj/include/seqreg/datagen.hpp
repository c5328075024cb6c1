#pragma once

// Reproducible data generators for the assumption regimes the theory
// covers: i.i.d. regressors with squared marginals from the built-in
// families, Gaussian causal moving averages across coordinates, and
// contraction autoregressions, plus the additive-noise response model.
// Every generator is a pure function of (spec, n, seed, stream).

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <variant>
#include <vector>

#include "seqreg/estimator.hpp"
#include "seqreg/rng.hpp"
#include "seqreg/smallball.hpp"

namespace seqreg {

// m(x) = sum_j c_j g(x_j) with g either the identity or tanh; both are
// 1-Lipschitz so the Hoelder bound holds with the declared beta = 1.
struct RegressionFunctionSpec {
  enum class Link { Identity, Tanh };

  ContractionCoeffs coeffs = ContractionCoeffs::geometric(1.0, 1.0);
  Link link = Link::Identity;
  double beta = 1.0;

  double eval(SeqView x) const;
};

struct IIDRegressors {
  DistSpec dist = DistSpec::chisq1();
};

struct GaussianMA {
  std::vector<double> coeffs;  // a_0, a_1, ...; square-summable by finiteness
};

struct NARInfinite {
  double sigma = 1.0;  // innovation standard deviation
};

struct ProcessSpec {
  std::variant<IIDRegressors, GaussianMA, NARInfinite> kind;
  std::size_t tau = 1;
  std::size_t burn_in = 0;  // NAR only; 0 selects max(10 tau, 1000)

  static ProcessSpec iid(DistSpec dist, std::size_t tau);
  static ProcessSpec gaussian_ma(std::vector<double> coeffs, std::size_t tau);
  static ProcessSpec nar(double sigma, std::size_t tau, std::size_t burn_in = 0);
};

// Truncate geometric MA coefficients a_j = base^j where the squared tail
// drops below tail_tol.
std::vector<double> geometric_ma_coeffs(double base, double tail_tol = 1e-12);

// One draw of X_s given X_s^2 ~ dist; the sign is symmetric except for
// ChiSq1 which draws X_s standard normal directly.
double sample_marginal(const DistSpec& dist, RngStream& rng);

// n regressor vectors with tau i.i.d. marginals each.
PointMatrix gen_iid(const ProcessSpec& spec, std::size_t n, std::uint64_t seed,
                    std::uint64_t stream = 0);

// n regressor vectors, each a length-tau window of the causal MA process
// X_s = sum_j a_j eps_{s-j} driven by fresh standard Gaussian innovations.
PointMatrix gen_gaussian_ma(const ProcessSpec& spec, std::size_t n, std::uint64_t seed,
                            std::uint64_t stream = 0);

struct NarOutput {
  std::vector<double> series;     // Y_1..Y_n after burn-in
  RegressionSample sample;        // lag-embedded; first tau observations dropped
};

// Iterates Y_t = m(Y_{t-1}, ..., Y_{t-tau}, 0, ...) + sigma eps_t from zero
// initial conditions, discards the burn-in, and lag-embeds the remainder.
// Throws ContractionViolated when sum_j c_j > 1.
NarOutput gen_nar(const ProcessSpec& spec, const RegressionFunctionSpec& m_spec,
                  std::size_t n, std::uint64_t seed, std::uint64_t stream = 0);

// Y_t = m(X_t) + noise_sigma * eps_t with i.i.d. standard Gaussian eps.
std::vector<double> gen_response(const PointMatrix& x,
                                 const RegressionFunctionSpec& m_spec,
                                 double noise_sigma, std::uint64_t seed,
                                 std::uint64_t stream = 0);

// Heteroskedastic variant: Y_t = m(X_t) + sigma(X_t) * eps_t.
using NoiseFunction = std::function<double(SeqView)>;
std::vector<double> gen_response(const PointMatrix& x,
                                 const RegressionFunctionSpec& m_spec,
                                 const NoiseFunction& noise_sigma, std::uint64_t seed,
                                 std::uint64_t stream = 0);

// One row per observation: Y, X_1, ..., X_tau.
void write_dataset_csv(std::ostream& os, const std::vector<double>& y,
                       const PointMatrix& x);

}  // namespace seqreg
