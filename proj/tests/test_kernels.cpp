#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "seqreg/errors.hpp"
#include "seqreg/kernels.hpp"
#include "seqreg/quadrature.hpp"

using namespace seqreg;

namespace {

const KernelKind kAllKinds[] = {KernelKind::UniformI, KernelKind::EpanechnikovII,
                                KernelKind::BiweightII, KernelKind::BartlettII,
                                KernelKind::GaussianIII};

RegressorSampler gaussian_sampler() {
  return [](RngStream& rng, std::vector<double>& row) {
    for (auto& v : row) v = rng.next_normal();
  };
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("closed-form values") {
  CHECK(kernel_eval(KernelSpec(KernelKind::UniformI, 1.0), 0.3) == doctest::Approx(1.0));
  CHECK(kernel_eval(KernelSpec(KernelKind::EpanechnikovII, 1.0), 0.0) ==
        doctest::Approx(1.5));
  CHECK(kernel_eval(KernelSpec(KernelKind::BartlettII, 1.0), 0.5) == doctest::Approx(1.0));
  CHECK(kernel_eval(KernelSpec(KernelKind::GaussianIII, 1.0), 0.0) ==
        doctest::Approx(std::sqrt(2.0 / std::numbers::pi)));
  for (KernelKind kind : kAllKinds) {
    if (!kernel_compact_support(kind)) continue;
    for (double lam : {0.5, 1.0, 2.0}) {
      CHECK(kernel_eval(KernelSpec(kind, lam), lam + 0.01) == 0.0);
    }
  }
  CHECK_THROWS_AS(kernel_eval(KernelSpec(KernelKind::UniformI, 1.0), -0.1), DomainError);
}

TEST_CASE("unit integral for every builtin") {
  for (KernelKind kind : kAllKinds) {
    for (double lam : {0.5, 1.0, 2.0}) {
      const KernelSpec spec(kind, lam);
      const double upper = kernel_compact_support(kind) ? lam : 40.0 * lam;
      const double integral = adaptive_simpson(
          [&](double u) { return kernel_eval(spec, u); }, 0.0, upper, 1e-10);
      CHECK(integral == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("type-II kernels decrease") {
  RngStream rng(3, 0);
  for (KernelKind kind :
       {KernelKind::EpanechnikovII, KernelKind::BiweightII, KernelKind::BartlettII}) {
    const KernelSpec spec(kind, 1.3);
    for (int rep = 0; rep < 500; ++rep) {
      double u1 = 1.3 * rng.next_double();
      double u2 = 1.3 * rng.next_double();
      if (u1 > u2) std::swap(u1, u2);
      CHECK(kernel_eval(spec, u1) >= kernel_eval(spec, u2));
    }
    CHECK(spec.deriv_min() < 0.0);
    CHECK(spec.deriv_min() <= spec.deriv_max());
  }
}

TEST_CASE("spherical weight composition") {
  const BandwidthSchedule sched(2.0, 0.5, 1.0);
  const SeqPoint x(std::vector<double>{0.2, -0.4});
  for (KernelKind kind : kAllKinds) {
    const KernelSpec spec(kind, 1.0);
    CHECK(spherical_weight(spec, x.view(), x.view(), sched) ==
          doctest::Approx(kernel_sup(spec)));
  }
  // far point is outside every compact support
  const SeqPoint far(std::vector<double>{100.0, 100.0});
  CHECK(spherical_weight(KernelSpec(KernelKind::EpanechnikovII, 1.0), far.view(), x.view(),
                         sched) == 0.0);
  // flat kernel is 1/lambda anywhere inside the ellipsoid
  const SeqPoint near(std::vector<double>{0.21, -0.41});
  CHECK(spherical_weight(KernelSpec(KernelKind::UniformI, 2.0), near.view(), x.view(),
                         sched) == doctest::Approx(0.5));
}

TEST_CASE("xi estimate: flat kernel identities") {
  const SeqPoint x = SeqPoint::zero(6);
  {
    const BandwidthSchedule sched(2.0, 0.8, 1.0);
    const auto est = estimate_xi(KernelSpec(KernelKind::UniformI, 1.0), gaussian_sampler(),
                                 6, x, sched, 20'000, 99);
    CHECK(est.xi1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(est.xi2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(est.stderr1 == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(est.phi_hat > 0.0);
  }
  {
    const BandwidthSchedule sched(2.0, 0.8, 2.0);
    const auto est = estimate_xi(KernelSpec(KernelKind::UniformI, 2.0), gaussian_sampler(),
                                 6, x, sched, 20'000, 99);
    CHECK(est.xi1 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(est.xi2 == doctest::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("xi estimate: type-I sandwich within three standard errors") {
  const SeqPoint x = SeqPoint::zero(8);
  const BandwidthSchedule sched(2.0, 0.6, 1.0);
  const KernelSpec spec(KernelKind::UniformI, 1.0);
  const auto est = estimate_xi(spec, gaussian_sampler(), 8, x, sched, 50'000, 7);
  const double c1 = spec.envelope_lower(), c2 = spec.envelope_upper();
  CHECK(est.xi1 >= c1 - 3.0 * est.stderr1 - 1e-12);
  CHECK(est.xi1 <= c2 + 3.0 * est.stderr1 + 1e-12);
  CHECK(est.xi2 >= c1 * c1 - 3.0 * est.stderr2 - 1e-12);
  CHECK(est.xi2 <= c2 * c2 + 3.0 * est.stderr2 + 1e-12);
}

TEST_CASE("xi estimate: reproducible across seeds within three stderr") {
  const SeqPoint x = SeqPoint::zero(12);
  const BandwidthSchedule sched(2.0, 0.5, 1.0);
  const KernelSpec spec(KernelKind::EpanechnikovII, 1.0);
  const auto a = estimate_xi(spec, gaussian_sampler(), 12, x, sched, 60'000, 1001);
  const auto b = estimate_xi(spec, gaussian_sampler(), 12, x, sched, 60'000, 2002);
  CHECK(a.xi1 > 0.0);
  CHECK(a.xi2 > 0.0);
  const double se1 = std::sqrt(a.stderr1 * a.stderr1 + b.stderr1 * b.stderr1);
  const double se2 = std::sqrt(a.stderr2 * a.stderr2 + b.stderr2 * b.stderr2);
  CHECK(std::abs(a.xi1 - b.xi1) <= 3.0 * se1);
  CHECK(std::abs(a.xi2 - b.xi2) <= 3.0 * se2);
}

TEST_CASE("gaussian kernel ratio escapes as h shrinks") {
  // Exponential-type kernels lose the bounded-ratio property: the
  // normalized kernel moment at h = 0.1 exceeds the one at h = 0.4.
  const SeqPoint x = SeqPoint::zero(50);
  const KernelSpec spec(KernelKind::GaussianIII, 1.0);
  const BandwidthSchedule fine(2.0, 0.1, 1.0);
  const BandwidthSchedule coarse(2.0, 0.4, 1.0);
  const auto r_fine = estimate_xi(spec, gaussian_sampler(), 50, x, fine, 400'000, 5);
  const auto r_coarse = estimate_xi(spec, gaussian_sampler(), 50, x, coarse, 400'000, 5);
  CHECK(r_fine.xi1 > r_coarse.xi1);
  CHECK(r_fine.xi2 > r_coarse.xi2);
  // calibrated gap: the fine ratio is several times the coarse one
  CHECK(r_fine.xi1 > 2.0 * r_coarse.xi1);
}

TEST_CASE("xi estimate: zero small ball") {
  const SeqPoint x = SeqPoint::zero(4);
  const BandwidthSchedule sched(2.0, 1e-9, 1.0);
  CHECK_THROWS_AS(estimate_xi(KernelSpec(KernelKind::UniformI, 1.0), gaussian_sampler(), 4,
                              x, sched, 2'000, 1),
                  ZeroSmallBall);
}

TEST_CASE("kernel names round-trip") {
  for (KernelKind kind : kAllKinds) {
    CHECK(kernel_from_name(kernel_name(kind)) == kind);
  }
  CHECK_THROWS_AS(kernel_from_name("triweight"), DomainError);
}

}  // TEST_SUITE
