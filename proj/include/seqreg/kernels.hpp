#pragma once

// Univariate kernels on [0, lambda]. Type-I kernels sit between two flat
// envelopes (uniform window); Type-II kernels decrease monotonically with
// bounded negative derivative (Epanechnikov, biweight, Bartlett); the
// one-sided Gaussian is of exponential type with semi-infinite support and
// is included only to demonstrate that the bounded-ratio property fails
// for it. Spherical weights compose a kernel with the weighted norm.

#include <cstdint>
#include <functional>
#include <string>

#include "seqreg/rng.hpp"
#include "seqreg/seqspace.hpp"

namespace seqreg {

enum class KernelKind { UniformI, EpanechnikovII, BiweightII, BartlettII, GaussianIII };

bool kernel_compact_support(KernelKind kind);
std::string kernel_name(KernelKind kind);
KernelKind kernel_from_name(const std::string& name);

struct KernelSpec {
  KernelKind kind;
  double lambda = 1.0;  // support radius; scale for GaussianIII

  KernelSpec(KernelKind k, double lam);

  // Flat-envelope constants of the window kernel (C1 = C2 = 1/lambda);
  // meaningful for UniformI only.
  double envelope_lower() const;
  double envelope_upper() const;
  // Range of K' on (0, lambda) for the compact kernels, from the closed
  // forms: [inf K', sup K'].
  double deriv_min() const;
  double deriv_max() const;
};

// K(u); zero outside [0, lambda] for the compact kinds. Closed forms on
// [0, 1] rescaled by u -> u/lambda with density factor 1/lambda, so the
// unit integral is preserved.
double kernel_eval(const KernelSpec& spec, double u);

// sup_u K(u) = K(0) for every built-in.
double kernel_sup(const KernelSpec& spec);

// K(||H^{-1}(x - center)||).
double spherical_weight(const KernelSpec& spec, SeqView x, SeqView center,
                        const BandwidthSchedule& sched);

struct XiEstimate {
  double xi1 = 0.0;
  double xi2 = 0.0;
  double stderr1 = 0.0;
  double stderr2 = 0.0;
  std::size_t n_mc = 0;
  double phi_hat = 0.0;  // empirical small-ball proportion of the run
};

// Fills the coordinate buffer with one fresh regressor draw.
using RegressorSampler = std::function<void(RngStream&, std::vector<double>&)>;

// Monte Carlo estimate of xi_j = E[K^j(||H^{-1}(x - X)||)] / phi_x(h lambda),
// j = 1, 2, with delta-method standard errors for the ratio of means.
// Throws ZeroSmallBall when no draw lands inside the ellipsoid.
XiEstimate estimate_xi(const KernelSpec& spec, const RegressorSampler& sampler,
                       std::size_t dim, const SeqPoint& x,
                       const BandwidthSchedule& sched, std::size_t n_mc,
                       std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace seqreg
