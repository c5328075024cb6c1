#include "seqreg/seqspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "seqreg/errors.hpp"

namespace seqreg {

BandwidthSchedule::BandwidthSchedule(double p_, double h_, double lambda_)
    : p(p_), h(h_), lambda(lambda_) {
  if (!(p >= 0.0)) throw DomainError("BandwidthSchedule: p must be >= 0");
  if (!(h > 0.0)) throw DomainError("BandwidthSchedule: h must be > 0");
  if (!(lambda > 0.0)) throw DomainError("BandwidthSchedule: lambda must be > 0");
}

double BandwidthSchedule::marginal(std::size_t j) const {
  return std::pow(static_cast<double>(j), p) * h;
}

std::vector<double> BandwidthSchedule::inverse_weights(std::size_t tau) const {
  std::vector<double> w(tau);
  for (std::size_t j = 0; j < tau; ++j) {
    w[j] = 1.0 / (std::pow(static_cast<double>(j + 1), p) * h);
  }
  return w;
}

double weighted_norm(SeqView x, SeqView center, const BandwidthSchedule& sched) {
  const std::size_t tau = std::max(x.size(), center.size());
  if (tau > kMaxTau) throw DomainError("weighted_norm: truncation exceeds 1e9");
  double sum = 0.0;
  for (std::size_t j = 0; j < tau; ++j) {
    const double xj = j < x.size() ? x[j] : 0.0;
    const double cj = j < center.size() ? center[j] : 0.0;
    const double t = (xj - cj) / sched.marginal(j + 1);
    sum += t * t;
  }
  return std::sqrt(sum);
}

double weighted_norm_sq(SeqView x, SeqView center, std::span<const double> inv_w) {
  const std::size_t tau = std::max(x.size(), center.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < tau; ++j) {
    const double xj = j < x.size() ? x[j] : 0.0;
    const double cj = j < center.size() ? center[j] : 0.0;
    const double t = (xj - cj) * inv_w[j];
    sum += t * t;
  }
  return sum;
}

double kolmogorov_entropy(std::size_t tau, double lambda, double eta) {
  if (tau == 0) throw DomainError("kolmogorov_entropy: tau must be positive");
  if (!(lambda > 0.0)) throw DomainError("kolmogorov_entropy: lambda must be > 0");
  if (!(eta > 0.0)) throw DomainError("kolmogorov_entropy: eta must be > 0");
  const double t = static_cast<double>(tau);
  return t * std::log(2.0 * lambda * std::sqrt(t) / eta + 1.0);
}

TruncSet::TruncSet(std::size_t tau_, double lambda_) : tau(tau_), lambda(lambda_) {
  if (tau == 0) throw DomainError("TruncSet: tau must be positive");
  if (!(lambda > 0.0)) throw DomainError("TruncSet: lambda must be > 0");
}

bool TruncSet::contains(SeqView u) const {
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (j < tau) {
      if (std::abs(u[j]) > lambda) return false;
    } else if (u[j] != 0.0) {
      return false;
    }
  }
  return true;
}

std::vector<SeqPoint> cover_grid(const TruncSet& set, double eta, std::size_t max_points) {
  if (!(eta > 0.0)) throw DomainError("cover_grid: eta must be > 0");
  if (eta > 2.0 * set.lambda) throw DomainError("cover_grid: eta must be <= 2*lambda");

  // Per-coordinate lattice: m = floor(2*lambda*sqrt(tau)/eta + 1) points on
  // [-lambda, lambda]. This respects the cardinality bound m^tau <=
  // (2 lambda sqrt(tau)/eta + 1)^tau, and the per-coordinate spacing
  // 2*lambda/(m-1) keeps every coordinate within eta/sqrt(tau) of the
  // lattice, so the Euclidean error over tau coordinates stays within eta.
  const double ratio = set.lambda * std::sqrt(static_cast<double>(set.tau)) / eta;
  std::size_t m = static_cast<std::size_t>(std::floor(2.0 * ratio + 1.0));
  if (m < 1) m = 1;
  if (ratio <= 0.5) m = 1;  // a single point at the origin already covers

  double total = 1.0;
  for (std::size_t j = 0; j < set.tau; ++j) {
    total *= static_cast<double>(m);
    if (total > static_cast<double>(max_points)) {
      throw CoverGridTooLarge("cover_grid: " + std::to_string(m) + "^" +
                              std::to_string(set.tau) + " points exceeds cap " +
                              std::to_string(max_points) +
                              "; reduce tau or increase eta");
    }
  }
  const std::size_t n_points = static_cast<std::size_t>(total);

  std::vector<double> axis(m);
  if (m == 1) {
    axis[0] = 0.0;
  } else {
    const double step = 2.0 * set.lambda / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i) axis[i] = -set.lambda + step * static_cast<double>(i);
  }

  std::vector<SeqPoint> grid;
  grid.reserve(n_points);
  std::vector<std::size_t> idx(set.tau, 0);
  for (std::size_t count = 0; count < n_points; ++count) {
    SeqPoint pt;
    pt.coords.resize(set.tau);
    for (std::size_t j = 0; j < set.tau; ++j) pt.coords[j] = axis[idx[j]];
    grid.push_back(std::move(pt));
    for (std::size_t j = 0; j < set.tau; ++j) {
      if (++idx[j] < m) break;
      idx[j] = 0;
    }
  }
  return grid;
}

}  // namespace seqreg
