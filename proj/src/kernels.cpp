#include "seqreg/kernels.hpp"

#include <cmath>

#include "seqreg/errors.hpp"

namespace seqreg {

namespace {
constexpr double kSqrt2OverPi = 0.79788456080286535588;  // sqrt(2/pi)
}

bool kernel_compact_support(KernelKind kind) { return kind != KernelKind::GaussianIII; }

std::string kernel_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::UniformI: return "uniform";
    case KernelKind::EpanechnikovII: return "epanechnikov";
    case KernelKind::BiweightII: return "biweight";
    case KernelKind::BartlettII: return "bartlett";
    case KernelKind::GaussianIII: return "gaussian";
  }
  return "?";
}

KernelKind kernel_from_name(const std::string& name) {
  if (name == "uniform") return KernelKind::UniformI;
  if (name == "epanechnikov") return KernelKind::EpanechnikovII;
  if (name == "biweight") return KernelKind::BiweightII;
  if (name == "bartlett") return KernelKind::BartlettII;
  if (name == "gaussian") return KernelKind::GaussianIII;
  throw DomainError("unknown kernel: " + name);
}

KernelSpec::KernelSpec(KernelKind k, double lam) : kind(k), lambda(lam) {
  if (!(lambda > 0.0)) throw DomainError("KernelSpec: lambda must be > 0");
}

double KernelSpec::envelope_lower() const {
  return kind == KernelKind::UniformI ? 1.0 / lambda : 0.0;
}

double KernelSpec::envelope_upper() const { return kernel_sup(*this); }

double KernelSpec::deriv_min() const {
  const double s = 1.0 / (lambda * lambda);
  switch (kind) {
    case KernelKind::UniformI: return 0.0;
    case KernelKind::EpanechnikovII: return -3.0 * s;         // at u = lambda
    case KernelKind::BiweightII: return -5.0 / std::sqrt(3.0) * s;  // at u = lambda/sqrt(3)
    case KernelKind::BartlettII: return -2.0 * s;
    case KernelKind::GaussianIII: return -kSqrt2OverPi * std::exp(-0.5) * s;
  }
  return 0.0;
}

double KernelSpec::deriv_max() const {
  switch (kind) {
    case KernelKind::UniformI: return 0.0;
    case KernelKind::EpanechnikovII: return 0.0;  // K'(0+) = 0
    case KernelKind::BiweightII: return 0.0;
    case KernelKind::BartlettII: return -2.0 / (lambda * lambda);
    case KernelKind::GaussianIII: return 0.0;
  }
  return 0.0;
}

double kernel_eval(const KernelSpec& spec, double u) {
  if (u < 0.0) throw DomainError("kernel_eval: u must be >= 0");
  const double lam = spec.lambda;
  const double v = u / lam;
  switch (spec.kind) {
    case KernelKind::UniformI:
      return v <= 1.0 ? 1.0 / lam : 0.0;
    case KernelKind::EpanechnikovII:
      return v <= 1.0 ? 1.5 * (1.0 - v * v) / lam : 0.0;
    case KernelKind::BiweightII: {
      if (v > 1.0) return 0.0;
      const double s = 1.0 - v * v;
      return 15.0 / 8.0 * s * s / lam;
    }
    case KernelKind::BartlettII:
      return v <= 1.0 ? 2.0 * (1.0 - v) / lam : 0.0;
    case KernelKind::GaussianIII:
      return kSqrt2OverPi * std::exp(-0.5 * v * v) / lam;
  }
  return 0.0;
}

double kernel_sup(const KernelSpec& spec) { return kernel_eval(spec, 0.0); }

double spherical_weight(const KernelSpec& spec, SeqView x, SeqView center,
                        const BandwidthSchedule& sched) {
  return kernel_eval(spec, weighted_norm(x, center, sched));
}

XiEstimate estimate_xi(const KernelSpec& spec, const RegressorSampler& sampler,
                       std::size_t dim, const SeqPoint& x,
                       const BandwidthSchedule& sched, std::size_t n_mc,
                       std::uint64_t seed, std::uint64_t stream) {
  if (n_mc < 1000) throw DomainError("estimate_xi: n_mc must be >= 1e3");
  RngStream rng(seed, stream);
  std::vector<double> draw(dim);
  const auto inv_w = sched.inverse_weights(std::max(dim, x.tau()));

  // Per-draw observables: w = K(norm), its square, and the in-ellipsoid
  // indicator. xi_j is the ratio of means m_j / phi.
  double s_w = 0.0, s_w2 = 0.0, s_w4 = 0.0, s_i = 0.0;
  double s_wi = 0.0, s_w2i = 0.0;
  for (std::size_t t = 0; t < n_mc; ++t) {
    sampler(rng, draw);
    const double norm = std::sqrt(weighted_norm_sq(draw, x.view(), inv_w));
    const double w = kernel_eval(spec, norm);
    const double ind = norm <= sched.lambda ? 1.0 : 0.0;
    s_w += w;
    s_w2 += w * w;
    s_w4 += w * w * w * w;
    s_i += ind;
    s_wi += w * ind;
    s_w2i += w * w * ind;
  }
  const double n = static_cast<double>(n_mc);
  const double phi = s_i / n;
  if (phi <= 0.0) {
    throw ZeroSmallBall("estimate_xi: no draw inside the ellipsoid; h too small for n_mc");
  }

  // Delta method for A/B with B the indicator mean:
  // var(A/B) ~= (var A - 2 r cov(A,B) + r^2 var B) / (n B^2).
  const auto ratio_stderr = [&](double mean_a, double var_a, double cov_ab) {
    const double var_b = phi * (1.0 - phi);
    const double r = mean_a / phi;
    const double v = (var_a - 2.0 * r * cov_ab + r * r * var_b) / (n * phi * phi);
    return v > 0.0 ? std::sqrt(v) : 0.0;
  };

  const double m1 = s_w / n, m2 = s_w2 / n;
  const double var1 = s_w2 / n - m1 * m1;
  const double var2 = s_w4 / n - m2 * m2;
  const double cov1 = s_wi / n - m1 * phi;
  const double cov2 = s_w2i / n - m2 * phi;

  XiEstimate out;
  out.xi1 = m1 / phi;
  out.xi2 = m2 / phi;
  out.stderr1 = ratio_stderr(m1, var1, cov1);
  out.stderr2 = ratio_stderr(m2, var2, cov2);
  out.n_mc = n_mc;
  out.phi_hat = phi;
  return out;
}

}  // namespace seqreg
