#include "seqreg/smallball.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "seqreg/errors.hpp"
#include "seqreg/quadrature.hpp"

namespace seqreg {

namespace {
constexpr double kPi = std::numbers::pi;

void require_p(double p) {
  if (!(p > 1.0)) throw DomainError("rate analytics require p > 1");
}
}  // namespace

DistSpec DistSpec::uniform_sq(double b) {
  if (!(b > 1.0)) throw DomainError("UniformSq(1,b): b must exceed 1");
  return {DistFamily::UniformSq, 1.0, b};
}
DistSpec DistSpec::gamma(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw DomainError("Gamma: parameters must be > 0");
  return {DistFamily::Gamma, alpha, beta};
}
DistSpec DistSpec::exponential(double eta) {
  if (!(eta > 0.0)) throw DomainError("Exp: eta must be > 0");
  return {DistFamily::Exponential, eta, 0.0};
}
DistSpec DistSpec::weibull(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw DomainError("Weibull: parameters must be > 0");
  return {DistFamily::Weibull, alpha, beta};
}
DistSpec DistSpec::pareto(double theta, double mu) {
  if (!(theta > 0.0) || !(mu > 0.0)) throw DomainError("Pareto: parameters must be > 0");
  return {DistFamily::Pareto, theta, mu};
}
DistSpec DistSpec::chisq1() { return {DistFamily::ChiSq1, 0.0, 0.0}; }

double DistSpec::rho() const {
  switch (family) {
    case DistFamily::UniformSq: return -1.0;
    case DistFamily::Gamma: return -par1;
    case DistFamily::Exponential: return -1.0;
    case DistFamily::Weibull: return -par1;
    case DistFamily::Pareto: return -1.0;
    case DistFamily::ChiSq1: return -0.5;
  }
  return 0.0;
}

double DistSpec::ell_limit() const {
  switch (family) {
    case DistFamily::UniformSq: return 1.0;
    case DistFamily::Gamma:
      return std::pow(par2, par1) / (par1 * std::tgamma(par1));
    case DistFamily::Exponential: return par1;
    case DistFamily::Weibull: return par2;
    case DistFamily::Pareto: return par2 / par1;  // mu / theta
    case DistFamily::ChiSq1: return std::sqrt(2.0 / kPi);
  }
  return 0.0;
}

bool DistSpec::has_laplace() const {
  return family == DistFamily::Gamma || family == DistFamily::Exponential ||
         family == DistFamily::ChiSq1;
}

double DistSpec::laplace(double t) const {
  switch (family) {
    case DistFamily::Gamma: return std::pow(1.0 + t / par2, -par1);
    case DistFamily::Exponential: return par1 / (par1 + t);
    case DistFamily::ChiSq1: return 1.0 / std::sqrt(1.0 + 2.0 * t);
    default: throw DomainError("laplace transform not available for " + name());
  }
}

double DistSpec::neg_dlog_laplace(double t) const {
  switch (family) {
    case DistFamily::Gamma: return par1 / (par2 + t);
    case DistFamily::Exponential: return 1.0 / (par1 + t);
    case DistFamily::ChiSq1: return 1.0 / (1.0 + 2.0 * t);
    default: throw DomainError("laplace transform not available for " + name());
  }
}

std::string DistSpec::name() const {
  char buf[64];
  switch (family) {
    case DistFamily::UniformSq: std::snprintf(buf, sizeof buf, "uniformsq:%g", par2); break;
    case DistFamily::Gamma: std::snprintf(buf, sizeof buf, "gamma:%g,%g", par1, par2); break;
    case DistFamily::Exponential: std::snprintf(buf, sizeof buf, "exp:%g", par1); break;
    case DistFamily::Weibull: std::snprintf(buf, sizeof buf, "weibull:%g,%g", par1, par2); break;
    case DistFamily::Pareto: std::snprintf(buf, sizeof buf, "pareto:%g,%g", par1, par2); break;
    case DistFamily::ChiSq1: return "chisq1";
  }
  return buf;
}

DistSpec parse_dist(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::string rest = text.substr(colon + 1);
    std::size_t pos = 0;
    while (pos < rest.size()) {
      std::size_t used = 0;
      args.push_back(std::stod(rest.substr(pos), &used));
      pos += used;
      if (pos < rest.size() && rest[pos] == ',') ++pos;
    }
  }
  const auto want = [&](std::size_t k) {
    if (args.size() != k)
      throw DomainError("distribution " + head + " expects " + std::to_string(k) +
                        " parameter(s)");
  };
  if (head == "chisq1") { want(0); return DistSpec::chisq1(); }
  if (head == "exp") { want(1); return DistSpec::exponential(args[0]); }
  if (head == "gamma") { want(2); return DistSpec::gamma(args[0], args[1]); }
  if (head == "weibull") { want(2); return DistSpec::weibull(args[0], args[1]); }
  if (head == "pareto") { want(2); return DistSpec::pareto(args[0], args[1]); }
  if (head == "uniformsq") { want(1); return DistSpec::uniform_sq(args[0]); }
  throw DomainError("unknown distribution: " + text);
}

KaramataData dist_constants(const DistSpec& dist, double p) {
  require_p(p);
  KaramataData out;
  out.rho = dist.rho();
  out.c_ell = 1.0 / std::sqrt(dist.ell_limit());
  const double s = std::sin(kPi / (2.0 * p));
  switch (dist.family) {
    case DistFamily::Gamma:
      out.zeta = dist.par1 * kPi * std::pow(dist.par2, -1.0 / (2.0 * p)) / s;
      break;
    case DistFamily::Exponential:
      out.zeta = kPi * std::pow(dist.par1, -1.0 / (2.0 * p)) / s;
      break;
    case DistFamily::ChiSq1:
      out.zeta = kPi * std::pow(2.0, (1.0 - 2.0 * p) / (2.0 * p)) / s;
      break;
    default:
      out.zeta = std::nullopt;  // integral diverges for these families
      break;
  }
  return out;
}

double zeta_quadrature(const DistSpec& dist, double p, double rel_tol) {
  require_p(p);
  if (!dist.has_laplace()) {
    throw QuadratureFailure("zeta quadrature undefined for " + dist.name());
  }
  const double inv2p = 1.0 / (2.0 * p);
  const auto g = [&](double u) { return dist.neg_dlog_laplace(u); };

  // Origin piece: u = s^q with q = 2p/(2p-1) flattens u^{-1/2p} exactly.
  const double q = 2.0 * p / (2.0 * p - 1.0);
  const double head_tol = rel_tol * g(0.0);
  double total = adaptive_simpson(
      [&](double s) { return q * g(std::pow(s, q)); }, 0.0, 1.0, head_tol);

  // Tail on the exponential scale u = e^w; integrand decays like e^{-w/2p}.
  const auto tail = [&](double w) {
    const double u = std::exp(w);
    return std::pow(u, 1.0 - inv2p) * g(u);
  };
  double lo = 0.0, hi = 8.0;
  for (int block = 0; block < 48; ++block) {
    const double piece =
        adaptive_simpson(tail, lo, hi, rel_tol * std::abs(total) / (hi - lo));
    total += piece;
    if (std::abs(piece) < 0.25 * rel_tol * std::abs(total) && block > 0) return total;
    lo = hi;
    hi *= 2.0;
  }
  throw QuadratureFailure("zeta quadrature: tail did not converge");
}

double spectral_constant(std::span<const double> ma_coeffs, double p, double rel_tol) {
  require_p(p);
  if (ma_coeffs.empty()) throw DomainError("spectral_constant: empty coefficient list");
  const auto symbol_pow = [&](double x) {
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < ma_coeffs.size(); ++j) {
      re += ma_coeffs[j] * std::cos(static_cast<double>(j) * x);
      im += ma_coeffs[j] * std::sin(static_cast<double>(j) * x);
    }
    return std::pow(std::sqrt(re * re + im * im), 1.0 / p);
  };
  const double integral = periodic_trapezoid(symbol_pow, 2.0 * kPi, rel_tol);
  return std::pow(integral / (2.0 * kPi), p);
}

namespace {

double chisq1_zeta(double p) {
  return kPi * std::pow(2.0, (1.0 - 2.0 * p) / (2.0 * p)) / std::sin(kPi / (2.0 * p));
}

double c_star_generic(double p, double rho, double zeta) {
  const double num = std::pow(2.0 * kPi, 1.0 + 2.0 * p * rho) * (2.0 * p - 1.0);
  const double den = std::pow(2.0 * p, (2.0 * p * (rho + 2.0) - 1.0) / (2.0 * p - 1.0));
  return num / den * std::tgamma(1.0 - rho) *
         std::pow(zeta, 2.0 * p * (1.0 + rho) / (2.0 * p - 1.0));
}

double c_dstar_generic(double p, double zeta) {
  return (2.0 * p - 1.0) * std::pow(zeta / (2.0 * p), 2.0 * p / (2.0 * p - 1.0));
}

double c_star_gaussian(double p) {
  const double zc = chisq1_zeta(p);
  return std::pow(2.0 * kPi, 1.0 - p) * (2.0 * p - 1.0) /
         (2.0 * std::pow(2.0 * p, (3.0 * p - 1.0) / (2.0 * p - 1.0))) *
         std::pow(zc, -p / (2.0 * p - 1.0));
}

double c_dstar_gaussian(double p) {
  const double base = kPi / (2.0 * p * std::sin(kPi / (2.0 * p)));
  return 0.5 * (2.0 * p - 1.0) * std::pow(base, 2.0 * p / (2.0 * p - 1.0));
}

}  // namespace

RateConstants rate_constants(const DistSpec& dist, double p, double lambda,
                             RateVariant variant, std::span<const double> ma_coeffs) {
  require_p(p);
  if (!(lambda > 0.0)) throw DomainError("rate_constants: lambda must be > 0");
  const KaramataData kd = dist_constants(dist, p);

  RateConstants out;
  out.rho = kd.rho;
  out.c_ell = kd.c_ell;
  out.zeta = kd.zeta;
  out.variant = variant;

  if (variant == RateVariant::IID) {
    if (!kd.zeta) {
      throw ZetaAbsent("rate_constants: zeta diverges for " + dist.name());
    }
    out.c_star = c_star_generic(p, kd.rho, *kd.zeta);
    out.c_dstar = c_dstar_generic(p, *kd.zeta);
    out.c_a = 1.0;
    return out;
  }

  if (dist.family != DistFamily::ChiSq1) {
    throw DomainError("GaussianDependent variant requires chisq1 marginals");
  }
  out.c_star = c_star_gaussian(p);
  out.c_dstar = c_dstar_gaussian(p);
  out.c_a = ma_coeffs.empty() ? 1.0 : spectral_constant(ma_coeffs, p);
  return out;
}

double empirical_small_ball(const std::vector<SeqPoint>& sample, const SeqPoint& x,
                            const BandwidthSchedule& sched) {
  if (sample.empty()) throw DomainError("empirical_small_ball: empty sample");
  std::size_t max_tau = x.tau();
  for (const auto& s : sample) max_tau = std::max(max_tau, s.tau());
  const auto inv_w = sched.inverse_weights(max_tau);
  const double thr = sched.lambda * sched.lambda;
  std::size_t hit = 0;
  for (const auto& s : sample) {
    if (weighted_norm_sq(s.view(), x.view(), inv_w) <= thr) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(sample.size());
}

double empirical_joint_small_ball(const std::vector<SeqPoint>& series,
                                  const SeqPoint& x, const BandwidthSchedule& sched,
                                  std::size_t lag) {
  if (lag == 0) throw DomainError("empirical_joint_small_ball: lag must be positive");
  if (series.size() <= lag) {
    throw DomainError("empirical_joint_small_ball: series shorter than lag");
  }
  std::size_t max_tau = x.tau();
  for (const auto& s : series) max_tau = std::max(max_tau, s.tau());
  const auto inv_w = sched.inverse_weights(max_tau);
  const double thr = sched.lambda * sched.lambda;
  std::vector<char> inside(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    inside[t] = weighted_norm_sq(series[t].view(), x.view(), inv_w) <= thr ? 1 : 0;
  }
  std::size_t hit = 0;
  const std::size_t pairs = series.size() - lag;
  for (std::size_t t = 0; t < pairs; ++t) {
    if (inside[t] && inside[t + lag]) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(pairs);
}

double gaussian_shift_factor(SeqView z, std::span<const double> gamma_diag) {
  double quad = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (z[j] == 0.0) continue;
    if (j >= gamma_diag.size() || !(gamma_diag[j] > 0.0)) {
      throw DomainError("gaussian_shift_factor: covariance must be positive on the support");
    }
    quad += z[j] * z[j] / gamma_diag[j];
  }
  return std::exp(-0.5 * quad);
}

double predicted_log_small_ball(double h, const RateConstants& consts, double lambda,
                                double p) {
  require_p(p);
  if (!(h > 0.0) || !(lambda > 0.0)) {
    throw DomainError("predicted_log_small_ball: h and lambda must be > 0");
  }
  const double k = 2.0 / (2.0 * p - 1.0);
  if (consts.variant == RateVariant::IID) {
    const double poly = (1.0 + 2.0 * consts.rho * p) / (2.0 * p - 1.0);
    return poly * std::log(lambda * h) - consts.c_dstar * std::pow(lambda * h, -k);
  }
  const double poly = (1.0 - p) / (2.0 * p - 1.0);
  return poly * std::log(lambda * h) -
         consts.c_dstar * std::pow(consts.c_a * lambda * h, -k);
}

}  // namespace seqreg
