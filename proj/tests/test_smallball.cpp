#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "seqreg/datagen.hpp"
#include "seqreg/errors.hpp"
#include "seqreg/rng.hpp"
#include "seqreg/smallball.hpp"

using namespace seqreg;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<SeqPoint> gaussian_sample(std::size_t n, std::size_t tau, std::uint64_t seed) {
  RngStream rng(seed, 0);
  std::vector<SeqPoint> out(n);
  for (auto& p : out) {
    p.coords.resize(tau);
    for (auto& v : p.coords) v = rng.next_normal();
  }
  return out;
}
}  // namespace

TEST_SUITE("smallball") {

TEST_CASE("table rows: rho, c_ell, zeta closed forms") {
  const double p = 2.0;
  const double s = std::sin(kPi / (2.0 * p));

  const auto exp1 = dist_constants(DistSpec::exponential(1.0), p);
  CHECK(exp1.rho == -1.0);
  CHECK(exp1.c_ell == doctest::Approx(1.0).epsilon(1e-15));
  REQUIRE(exp1.zeta.has_value());
  CHECK(*exp1.zeta == doctest::Approx(kPi / s).epsilon(1e-15));

  const auto gam = dist_constants(DistSpec::gamma(2.0, 1.5), p);
  CHECK(gam.rho == -2.0);
  CHECK(gam.c_ell ==
        doctest::Approx(1.0 / std::sqrt(std::pow(1.5, 2.0) / (2.0 * std::tgamma(2.0)))));
  REQUIRE(gam.zeta.has_value());
  CHECK(*gam.zeta == doctest::Approx(2.0 * kPi * std::pow(1.5, -0.25) / s).epsilon(1e-15));

  const auto chi = dist_constants(DistSpec::chisq1(), p);
  CHECK(chi.rho == -0.5);
  CHECK(chi.c_ell == doctest::Approx(1.0 / std::sqrt(std::sqrt(2.0 / kPi))).epsilon(1e-15));
  REQUIRE(chi.zeta.has_value());
  CHECK(*chi.zeta == doctest::Approx(kPi * std::pow(2.0, -0.75) / s).epsilon(1e-15));

  // divergent rows carry no zeta
  CHECK(!dist_constants(DistSpec::uniform_sq(3.0), p).zeta.has_value());
  CHECK(!dist_constants(DistSpec::weibull(1.5, 2.0), p).zeta.has_value());
  CHECK(!dist_constants(DistSpec::pareto(2.0, 3.0), p).zeta.has_value());
  CHECK(dist_constants(DistSpec::weibull(1.5, 2.0), p).rho == -1.5);
  CHECK(dist_constants(DistSpec::pareto(2.0, 3.0), p).c_ell ==
        doctest::Approx(1.0 / std::sqrt(1.5)));
}

TEST_CASE("zeta quadrature reproduces every closed form") {
  const DistSpec dists[] = {DistSpec::exponential(1.0), DistSpec::exponential(2.5),
                            DistSpec::gamma(2.0, 1.5), DistSpec::gamma(0.7, 3.0),
                            DistSpec::chisq1()};
  for (double p : {1.5, 2.0, 3.0}) {
    for (const auto& dist : dists) {
      const auto kd = dist_constants(dist, p);
      REQUIRE(kd.zeta.has_value());
      const double q = zeta_quadrature(dist, p);
      CHECK(std::abs(q - *kd.zeta) / *kd.zeta < 1e-6);
    }
  }
  CHECK_THROWS_AS(zeta_quadrature(DistSpec::weibull(1.0, 1.0), 2.0), QuadratureFailure);
}

TEST_CASE("generic c_dstar specializes to the gaussian closed form") {
  for (double p : {1.5, 2.0, 3.0}) {
    const auto iid = rate_constants(DistSpec::chisq1(), p, 1.0, RateVariant::IID);
    const auto gau =
        rate_constants(DistSpec::chisq1(), p, 1.0, RateVariant::GaussianDependent);
    CHECK(std::abs(iid.c_dstar - gau.c_dstar) / gau.c_dstar < 1e-10);
    CHECK(gau.c_a == 1.0);
  }
}

TEST_CASE("rate constants errors") {
  CHECK_THROWS_AS(rate_constants(DistSpec::weibull(1.0, 1.0), 2.0, 1.0, RateVariant::IID),
                  ZetaAbsent);
  CHECK_THROWS_AS(
      rate_constants(DistSpec::exponential(1.0), 2.0, 1.0, RateVariant::GaussianDependent),
      DomainError);
  CHECK_THROWS_AS(rate_constants(DistSpec::chisq1(), 1.0, 1.0, RateVariant::IID),
                  DomainError);
}

TEST_CASE("spectral constant properties") {
  // singleton coefficient: constant symbol
  const double one[] = {1.0};
  CHECK(spectral_constant(one, 2.0) == doctest::Approx(1.0).epsilon(1e-12));

  const auto a = geometric_ma_coeffs(0.5);
  const double ca = spectral_constant(a, 2.0);
  CHECK(ca > 0.0);

  // homogeneity |c| C_A(a)
  std::vector<double> scaled(a);
  for (auto& v : scaled) v *= -2.5;
  CHECK(spectral_constant(scaled, 2.0) == doctest::Approx(2.5 * ca).epsilon(1e-10));

  // index shift multiplies the symbol by a phase: modulus unchanged
  std::vector<double> shifted(a.size() + 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) shifted[i + 1] = a[i];
  CHECK(spectral_constant(shifted, 2.0) == doctest::Approx(ca).epsilon(1e-10));
}

TEST_CASE("spectral constant matches a fixed-grid trapezoid oracle") {
  const auto a = geometric_ma_coeffs(0.5);
  const auto value_at = [&](std::size_t m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double x = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(m);
      double re = 0.0, im = 0.0;
      for (std::size_t j = 0; j < a.size(); ++j) {
        re += a[j] * std::cos(static_cast<double>(j) * x);
        im += a[j] * std::sin(static_cast<double>(j) * x);
      }
      acc += std::sqrt(std::sqrt(re * re + im * im));
    }
    const double mean = acc / static_cast<double>(m);
    return mean * mean;  // p = 2
  };
  const double v2048 = value_at(2048);
  const double v4096 = value_at(4096);
  CHECK(std::abs(v4096 - v2048) / v4096 < 1e-8);  // refinement converged
  CHECK(spectral_constant(a, 2.0) == doctest::Approx(v4096).epsilon(1e-8));
}

TEST_CASE("empirical small ball basics") {
  const BandwidthSchedule sched(2.0, 0.4, 1.0);
  const SeqPoint x(std::vector<double>{0.3, -0.2});
  std::vector<SeqPoint> all_x(50, x);
  CHECK(empirical_small_ball(all_x, x, sched) == 1.0);

  auto sample = gaussian_sample(400, 2, 5);
  const BandwidthSchedule tiny(2.0, 1e-12, 1.0);
  CHECK(empirical_small_ball(sample, x, tiny) == 0.0);

  // monotone in h: nested ellipsoids
  double prev = 0.0;
  for (double h : {0.1, 0.2, 0.4, 0.8, 1.6}) {
    const double phi = empirical_small_ball(sample, x, BandwidthSchedule(2.0, h, 1.0));
    CHECK(phi >= prev);
    prev = phi;
  }
  CHECK_THROWS_AS(empirical_small_ball({}, x, sched), DomainError);
}

TEST_CASE("finite-dimensional volume oracle on the unit square") {
  // X uniform on [0,1]^2, flat weights, radius 0.1 around the center:
  // phi = pi r^2 with the density identically one.
  RngStream rng(424242, 0);
  const std::size_t n = 100'000;
  std::vector<SeqPoint> sample(n);
  for (auto& pnt : sample) {
    pnt.coords = {rng.next_double(), rng.next_double()};
  }
  const SeqPoint center(std::vector<double>{0.5, 0.5});
  const BandwidthSchedule sched(0.0, 0.1, 1.0);
  const double phi = empirical_small_ball(sample, center, sched);
  const double expect = kPi * 0.01;
  const double se = std::sqrt(expect * (1.0 - expect) / static_cast<double>(n));
  CHECK(std::abs(phi - expect) <= 3.0 * se);
}

TEST_CASE("joint small ball: independence factorization") {
  const auto series = gaussian_sample(20'000, 3, 77);
  const SeqPoint x = SeqPoint::zero(3);
  const BandwidthSchedule sched(1.0, 0.9, 1.0);
  const double phi = empirical_small_ball(series, x, sched);
  const double psi = empirical_joint_small_ball(series, x, sched, 1);
  const double n = static_cast<double>(series.size());
  const double se_psi = std::sqrt(psi * (1.0 - psi) / n);
  const double se_phi2 = 2.0 * phi * std::sqrt(phi * (1.0 - phi) / n);
  CHECK(std::abs(psi - phi * phi) <= 3.0 * (se_psi + se_phi2) + 1e-12);

  std::vector<SeqPoint> constant(100, x);
  CHECK(empirical_joint_small_ball(constant, x, sched, 5) == 1.0);
  CHECK_THROWS_AS(empirical_joint_small_ball(constant, x, sched, 0), DomainError);
  CHECK_THROWS_AS(empirical_joint_small_ball(constant, x, sched, 100), DomainError);
}

TEST_CASE("joint small ball: MA(1)-in-time ratio stays bounded") {
  // Series dependent across t: X_t = (eta_t + eta_{t-1}) / sqrt(2)
  // coordinate-wise, so (X_t, X_{t+1}) are correlated.
  RngStream rng(909, 0);
  const std::size_t n = 30'000, tau = 3;
  std::vector<std::vector<double>> eta(n + 1, std::vector<double>(tau));
  for (auto& row : eta) {
    for (auto& v : row) v = rng.next_normal();
  }
  std::vector<SeqPoint> series(n);
  for (std::size_t t = 0; t < n; ++t) {
    series[t].coords.resize(tau);
    for (std::size_t j = 0; j < tau; ++j) {
      series[t].coords[j] = (eta[t + 1][j] + eta[t][j]) / std::sqrt(2.0);
    }
  }
  const SeqPoint x = SeqPoint::zero(tau);
  for (double h : {0.7, 1.0}) {
    const BandwidthSchedule sched(1.0, h, 1.0);
    const double phi = empirical_small_ball(series, x, sched);
    const double psi = empirical_joint_small_ball(series, x, sched, 1);
    REQUIRE(phi > 0.0);
    const double ratio = psi / (phi * phi);
    CHECK(ratio > 0.2);
    CHECK(ratio < 5.0);
  }
}

TEST_CASE("gaussian shift factor") {
  const double ones[] = {1.0, 1.0, 1.0};
  CHECK(gaussian_shift_factor(SeqPoint::zero(3).view(), ones) == 1.0);
  const SeqPoint e1(std::vector<double>{1.0});
  CHECK(gaussian_shift_factor(e1.view(), ones) == doctest::Approx(std::exp(-0.5)));

  RngStream rng(17, 0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> z(3), g(3);
    for (int j = 0; j < 3; ++j) {
      z[j] = rng.next_normal();
      g[j] = 0.2 + rng.next_double();
    }
    const double f = gaussian_shift_factor(z, g);
    CHECK(f > 0.0);
    CHECK(f <= 1.0);
    auto grown = z;
    grown[1] *= 2.0;
    CHECK(gaussian_shift_factor(grown, g) <= f);
  }
  const double bad[] = {1.0, -1.0};
  CHECK_THROWS_AS(gaussian_shift_factor(e1.view(), {}), DomainError);
  CHECK_THROWS_AS(gaussian_shift_factor(SeqPoint(std::vector<double>{1.0, 1.0}).view(), bad),
                  DomainError);
}

TEST_CASE("predicted log small ball: differences and slope") {
  const auto consts =
      rate_constants(DistSpec::chisq1(), 2.0, 1.0, RateVariant::GaussianDependent);
  // slope against (lambda h)^{-2/3} is exactly -C**_G by construction
  const double h1 = 0.2, h2 = 0.35;
  const double y1 = predicted_log_small_ball(h1, consts, 1.0, 2.0);
  const double y2 = predicted_log_small_ball(h2, consts, 1.0, 2.0);
  const double poly = (1.0 - 2.0) / 3.0;
  const double slope = ((y1 - poly * std::log(h1)) - (y2 - poly * std::log(h2))) /
                       (std::pow(h1, -2.0 / 3.0) - std::pow(h2, -2.0 / 3.0));
  CHECK(slope == doctest::Approx(-consts.c_dstar).epsilon(1e-12));

  // the difference form is free of the additive constant: shifting both
  // evaluations by the same amount cancels exactly
  CHECK(y1 - y2 == doctest::Approx((y1 + 5.0) - (y2 + 5.0)).epsilon(1e-15));
}

}  // TEST_SUITE
