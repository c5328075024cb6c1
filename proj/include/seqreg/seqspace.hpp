#pragma once

// Geometry of the weighted sequence space: polynomial bandwidth schedules
// h_j = j^p * h, the weighted norm ||H^{-1}(x - c)||, the truncated
// sup-norm ball S_tau and its Kolmogorov entropy, and deterministic
// covering grids used as evaluation sets in uniform-consistency runs.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace seqreg {

using SeqView = std::span<const double>;

// A point of the sequence space stored as a finite truncation: coordinates
// beyond coords.size() are identically zero.
struct SeqPoint {
  std::vector<double> coords;

  SeqPoint() = default;
  explicit SeqPoint(std::vector<double> c) : coords(std::move(c)) {}
  static SeqPoint zero(std::size_t tau) { return SeqPoint(std::vector<double>(tau, 0.0)); }

  std::size_t tau() const { return coords.size(); }
  SeqView view() const { return coords; }
};

// Marginal bandwidths h_j = j^p * h with kernel support radius lambda.
// p >= 1 is what the rate theory assumes (p > 1 where required); p in
// [0, 1) is accepted so finite-dimensional diagnostics with flat weights
// remain expressible. Operations that need p > 1 check it themselves.
struct BandwidthSchedule {
  double p;
  double h;
  double lambda;

  BandwidthSchedule(double p_, double h_, double lambda_);

  double marginal(std::size_t j) const;  // h_j
  // 1 / h_j for j = 1..tau; the hot loops index this directly.
  std::vector<double> inverse_weights(std::size_t tau) const;
};

inline constexpr std::size_t kMaxTau = 1'000'000'000;

// sqrt( sum_j (x_j - c_j)^2 / h_j^2 ) over the union of supports. Exact:
// truncated points carry no tail.
double weighted_norm(SeqView x, SeqView center, const BandwidthSchedule& sched);

// Squared weighted norm against precomputed inverse weights (covering the
// longer of the two supports).
double weighted_norm_sq(SeqView x, SeqView center, std::span<const double> inv_w);

// tau * log(2 * lambda * sqrt(tau) / eta + 1), the log covering number of
// S_tau by eta-balls.
double kolmogorov_entropy(std::size_t tau, double lambda, double eta);

// S_tau = { u : |u_j| <= lambda for j <= tau, u_j = 0 otherwise }.
struct TruncSet {
  std::size_t tau;
  double lambda;

  TruncSet(std::size_t tau_, double lambda_);
  bool contains(SeqView u) const;
};

// Axis-aligned lattice covering S_tau with Euclidean radius eta. Per
// coordinate the step is at most 2*eta/sqrt(tau); the total point count
// never exceeds (2*lambda*sqrt(tau)/eta + 1)^tau. Throws CoverGridTooLarge
// when the lattice would exceed max_points.
std::vector<SeqPoint> cover_grid(const TruncSet& set, double eta,
                                 std::size_t max_points = 10'000'000);

}  // namespace seqreg
