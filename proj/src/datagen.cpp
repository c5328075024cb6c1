#include "seqreg/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "seqreg/errors.hpp"

namespace seqreg {

double RegressionFunctionSpec::eval(SeqView x) const {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double g = link == Link::Identity ? x[j] : std::tanh(x[j]);
    s += coeffs.coeff(j + 1) * g;
  }
  return s;
}

ProcessSpec ProcessSpec::iid(DistSpec dist, std::size_t tau) {
  if (tau == 0) throw DomainError("ProcessSpec: tau must be positive");
  return ProcessSpec{IIDRegressors{dist}, tau, 0};
}

ProcessSpec ProcessSpec::gaussian_ma(std::vector<double> coeffs, std::size_t tau) {
  if (tau == 0) throw DomainError("ProcessSpec: tau must be positive");
  if (coeffs.empty()) throw DomainError("ProcessSpec: MA coefficients empty");
  return ProcessSpec{GaussianMA{std::move(coeffs)}, tau, 0};
}

ProcessSpec ProcessSpec::nar(double sigma, std::size_t tau, std::size_t burn_in) {
  if (tau == 0) throw DomainError("ProcessSpec: tau must be positive");
  if (!(sigma >= 0.0)) throw DomainError("ProcessSpec: sigma must be >= 0");
  return ProcessSpec{NARInfinite{sigma}, tau, burn_in};
}

std::vector<double> geometric_ma_coeffs(double base, double tail_tol) {
  if (!(std::abs(base) < 1.0)) throw DomainError("geometric_ma_coeffs: |base| must be < 1");
  std::vector<double> a{1.0};
  const double q = base * base;
  // squared tail after J terms: base^{2J} q / (1 - q)
  double tail = q / (1.0 - q);
  while (tail >= tail_tol) {
    a.push_back(a.back() * base);
    tail *= q;
  }
  return a;
}

double sample_marginal(const DistSpec& dist, RngStream& rng) {
  double v;
  switch (dist.family) {
    case DistFamily::ChiSq1:
      return rng.next_normal();
    case DistFamily::UniformSq:
      v = rng.next_uniform(dist.par1, dist.par2);
      break;
    case DistFamily::Gamma:
      v = rng.next_gamma(dist.par1, dist.par2);
      break;
    case DistFamily::Exponential:
      v = rng.next_exponential(dist.par1);
      break;
    case DistFamily::Weibull:
      v = std::pow(-std::log(rng.next_double_pos()) / dist.par2, 1.0 / dist.par1);
      break;
    case DistFamily::Pareto:
      v = dist.par1 * (std::pow(rng.next_double_pos(), -1.0 / dist.par2) - 1.0);
      break;
    default:
      throw DomainError("sample_marginal: unsupported family");
  }
  const double x = std::sqrt(v);
  return rng.next_sign() ? x : -x;
}

PointMatrix gen_iid(const ProcessSpec& spec, std::size_t n, std::uint64_t seed,
                    std::uint64_t stream) {
  const auto* iid = std::get_if<IIDRegressors>(&spec.kind);
  if (!iid) throw DomainError("gen_iid: spec is not IIDRegressors");
  RngStream rng(seed, stream);
  PointMatrix out(n, spec.tau);
  for (std::size_t t = 0; t < n; ++t) {
    double* row = out.mutable_row(t);
    for (std::size_t s = 0; s < spec.tau; ++s) row[s] = sample_marginal(iid->dist, rng);
  }
  return out;
}

PointMatrix gen_gaussian_ma(const ProcessSpec& spec, std::size_t n, std::uint64_t seed,
                            std::uint64_t stream) {
  const auto* ma = std::get_if<GaussianMA>(&spec.kind);
  if (!ma) throw DomainError("gen_gaussian_ma: spec is not GaussianMA");
  const std::size_t order = ma->coeffs.size();
  RngStream rng(seed, stream);
  PointMatrix out(n, spec.tau);
  std::vector<double> eps(spec.tau + order - 1);
  for (std::size_t t = 0; t < n; ++t) {
    for (auto& e : eps) e = rng.next_normal();
    double* row = out.mutable_row(t);
    // X_s = sum_j a_j eps_{s-j}; eps index offset keeps the window causal.
    for (std::size_t s = 0; s < spec.tau; ++s) {
      double acc = 0.0;
      for (std::size_t j = 0; j < order; ++j) acc += ma->coeffs[j] * eps[order - 1 + s - j];
      row[s] = acc;
    }
  }
  return out;
}

NarOutput gen_nar(const ProcessSpec& spec, const RegressionFunctionSpec& m_spec,
                  std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  const auto* nar = std::get_if<NARInfinite>(&spec.kind);
  if (!nar) throw DomainError("gen_nar: spec is not NARInfinite");
  const double csum = m_spec.coeffs.sum();
  if (csum > 1.0) {
    throw ContractionViolated("gen_nar: contraction coefficients sum to " +
                              std::to_string(csum) + " > 1");
  }
  const std::size_t tau = spec.tau;
  std::size_t burn = spec.burn_in;
  if (burn == 0) burn = std::max<std::size_t>(10 * tau, 1000);
  if (burn < 10 * tau) throw DomainError("gen_nar: burn_in must be >= 10 tau");

  RngStream rng(seed, stream);
  const std::size_t total = burn + n;
  std::vector<double> path(total, 0.0);
  std::vector<double> lags(tau, 0.0);
  for (std::size_t t = 0; t < total; ++t) {
    for (std::size_t j = 0; j < tau; ++j) {
      lags[j] = t >= j + 1 ? path[t - j - 1] : 0.0;
    }
    path[t] = m_spec.eval(lags) + nar->sigma * rng.next_normal();
  }

  NarOutput out;
  out.series.assign(path.begin() + static_cast<std::ptrdiff_t>(burn), path.end());

  // Lag embedding from the returned series only: the first tau
  // observations lack a full lag vector and are dropped.
  const std::size_t m = n > tau ? n - tau : 0;
  out.sample.origin = RegressionSample::Origin::Autoregressive;
  out.sample.y.resize(m);
  out.sample.x = PointMatrix(m, tau);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t t = tau + i;  // index into out.series
    out.sample.y[i] = out.series[t];
    double* row = out.sample.x.mutable_row(i);
    for (std::size_t j = 0; j < tau; ++j) row[j] = out.series[t - j - 1];
  }
  return out;
}

std::vector<double> gen_response(const PointMatrix& x,
                                 const RegressionFunctionSpec& m_spec,
                                 double noise_sigma, std::uint64_t seed,
                                 std::uint64_t stream) {
  if (!(noise_sigma >= 0.0)) throw DomainError("gen_response: sigma must be >= 0");
  RngStream rng(seed, stream);
  std::vector<double> y(x.n);
  for (std::size_t t = 0; t < x.n; ++t) {
    y[t] = m_spec.eval(x.row(t)) + noise_sigma * rng.next_normal();
  }
  return y;
}

std::vector<double> gen_response(const PointMatrix& x,
                                 const RegressionFunctionSpec& m_spec,
                                 const NoiseFunction& noise_sigma, std::uint64_t seed,
                                 std::uint64_t stream) {
  RngStream rng(seed, stream);
  std::vector<double> y(x.n);
  for (std::size_t t = 0; t < x.n; ++t) {
    const double s = noise_sigma(x.row(t));
    if (!(s >= 0.0)) throw DomainError("gen_response: sigma(x) must be >= 0");
    y[t] = m_spec.eval(x.row(t)) + s * rng.next_normal();
  }
  return y;
}

void write_dataset_csv(std::ostream& os, const std::vector<double>& y,
                       const PointMatrix& x) {
  if (y.size() != x.n) throw DomainError("write_dataset_csv: lengths disagree");
  os << "Y";
  for (std::size_t j = 1; j <= x.tau; ++j) os << ",X" << j;
  os << "\n";
  char buf[32];
  for (std::size_t t = 0; t < x.n; ++t) {
    std::snprintf(buf, sizeof buf, "%.17g", y[t]);
    os << buf;
    const auto row = x.row(t);
    for (std::size_t j = 0; j < x.tau; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", row[j]);
      os << ',' << buf;
    }
    os << "\n";
  }
}

}  // namespace seqreg
