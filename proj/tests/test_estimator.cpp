#include <cmath>
#include <vector>

#include "doctest.h"
#include "seqreg/datagen.hpp"
#include "seqreg/errors.hpp"
#include "seqreg/estimator.hpp"
#include "seqreg/rng.hpp"

using namespace seqreg;

namespace {

RegressionSample make_sample(const std::vector<std::vector<double>>& xs,
                             const std::vector<double>& ys) {
  RegressionSample s;
  s.y = ys;
  s.x = PointMatrix(xs.size(), xs.empty() ? 0 : xs[0].size());
  for (std::size_t t = 0; t < xs.size(); ++t) {
    std::copy(xs[t].begin(), xs[t].end(), s.x.mutable_row(t));
  }
  return s;
}

}  // namespace

TEST_SUITE("estimator") {

TEST_CASE("constant responses give the constant") {
  const auto s = make_sample({{0.1}, {-0.2}, {0.05}, {5.0}}, {3.7, 3.7, 3.7, 3.7});
  const BandwidthSchedule sched(1.0, 0.5, 1.0);
  const auto est = nw_estimate(s, SeqPoint::zero(1), KernelSpec(KernelKind::EpanechnikovII, 1.0),
                               sched);
  REQUIRE(est.has_value());
  CHECK(est->value == doctest::Approx(3.7).epsilon(1e-15));
}

TEST_CASE("single in-window observation wins") {
  const auto s = make_sample({{0.1}, {9.0}, {8.0}}, {1.25, -7.0, 4.0});
  const BandwidthSchedule sched(1.0, 0.5, 1.0);
  const auto est =
      nw_estimate(s, SeqPoint::zero(1), KernelSpec(KernelKind::BiweightII, 1.0), sched);
  REQUIRE(est.has_value());
  CHECK(est->value == 1.25);
  CHECK(est->denom_count == 1);
}

TEST_CASE("equidistant pair averages under a radial kernel") {
  const auto s = make_sample({{0.3}, {-0.3}}, {2.0, 6.0});
  const BandwidthSchedule sched(1.0, 0.5, 1.0);
  const auto est =
      nw_estimate(s, SeqPoint::zero(1), KernelSpec(KernelKind::EpanechnikovII, 1.0), sched);
  REQUIRE(est.has_value());
  CHECK(est->value == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("empty window is explicit") {
  const auto s = make_sample({{5.0}, {-5.0}}, {1.0, 2.0});
  const BandwidthSchedule sched(1.0, 0.1, 1.0);
  const auto est =
      nw_estimate(s, SeqPoint::zero(1), KernelSpec(KernelKind::UniformI, 1.0), sched);
  CHECK(!est.has_value());
}

TEST_CASE("randomized algebra: convexity, locality, flat-kernel mean") {
  RngStream rng(1234, 0);
  const BandwidthSchedule sched(1.5, 0.6, 1.0);
  const SeqPoint x = SeqPoint::zero(3);
  const KernelSpec epan(KernelKind::EpanechnikovII, 1.0);
  const KernelSpec flat(KernelKind::UniformI, 1.0);
  int evaluated = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 5 + static_cast<std::size_t>(rng.next_double() * 30);
    RegressionSample s;
    s.y.resize(n);
    s.x = PointMatrix(n, 3);
    for (std::size_t t = 0; t < n; ++t) {
      s.y[t] = 3.0 * rng.next_normal();
      double* row = s.x.mutable_row(t);
      for (int j = 0; j < 3; ++j) row[j] = rng.next_normal() * 0.7;
    }
    const auto est = nw_estimate(s, x, epan, sched);
    if (!est) continue;
    ++evaluated;

    // convexity: the estimate lies in the hull of positively weighted responses
    double lo = 1e300, hi = -1e300;
    double flat_sum = 0.0;
    std::size_t flat_count = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const double w = spherical_weight(epan, s.x.row(t), x.view(), sched);
      if (w > 0.0) {
        lo = std::min(lo, s.y[t]);
        hi = std::max(hi, s.y[t]);
      }
      if (weighted_norm(s.x.row(t), x.view(), sched) <= sched.lambda) {
        flat_sum += s.y[t];
        ++flat_count;
      }
    }
    CHECK(est->value >= lo - 1e-12);
    CHECK(est->value <= hi + 1e-12);

    // locality: a zero-weight observation leaves the estimate bit-identical
    RegressionSample extended = s;
    extended.y.push_back(1e6);
    PointMatrix bigger(n + 1, 3);
    std::copy(s.x.data.begin(), s.x.data.end(), bigger.data.begin());
    double* last = bigger.mutable_row(n);
    last[0] = 50.0;
    last[1] = -50.0;
    last[2] = 50.0;
    extended.x = std::move(bigger);
    const auto est2 = nw_estimate(extended, x, epan, sched);
    REQUIRE(est2.has_value());
    CHECK(est2->value == est->value);

    // flat kernel equals the plain in-window mean (independent route)
    if (flat_count > 0) {
      const auto estf = nw_estimate(s, x, flat, sched);
      REQUIRE(estf.has_value());
      CHECK(estf->value == doctest::Approx(flat_sum / static_cast<double>(flat_count))
                               .epsilon(1e-12));
    }

    // kernel-scale invariance: an independent weighted average with weights
    // c * K matches the estimator to 1e-12
    const double c = 0.5 + 4.0 * rng.next_double();
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double w = c * spherical_weight(epan, s.x.row(t), x.view(), sched);
      num += w * s.y[t];
      den += w;
    }
    CHECK(est->value == doctest::Approx(num / den).epsilon(1e-12));
  }
  CHECK(evaluated > 100);
}

TEST_CASE("bias bound closed cases") {
  const auto single = ContractionCoeffs::explicit_list({1.0, 0.0, 0.0});
  CHECK(bias_bound(0.0, 1.0, 1.0, single, 1.0) == 0.0);
  for (double h : {0.05, 0.3, 1.1}) {
    CHECK(bias_bound(h, 1.0, 1.0, single, 1.0) == doctest::Approx(h).epsilon(1e-15));
  }

  // geometric family against a partial-sum oracle
  const auto geo = ContractionCoeffs::geometric(1.0, 1.0);
  double oracle = 0.0;
  for (int j = 1; j < 200; ++j) {
    oracle += std::exp(-static_cast<double>(j)) * std::pow(static_cast<double>(j), 2.0);
  }
  CHECK(bias_bound(0.1, 1.0, 1.0, geo, 2.0) == doctest::Approx(0.1 * oracle).epsilon(1e-12));

  CHECK_THROWS_AS(bias_bound(0.1, 1.0, 1.0, ContractionCoeffs::geometric(1.0, 0.0), 2.0),
                  NonSummable);
  CHECK_THROWS_AS(bias_bound(0.1, 1.5, 1.0, geo, 2.0), DomainError);
}

TEST_CASE("bias bound is monotone in h and lambda") {
  const auto geo = ContractionCoeffs::geometric(0.8, 1.2);
  double prev = -1.0;
  for (double h : {0.1, 0.2, 0.4, 0.8}) {
    const double b = bias_bound(h, 0.7, 1.0, geo, 2.0);
    CHECK(b > prev);
    prev = b;
  }
  CHECK(bias_bound(0.3, 0.7, 2.0, geo, 2.0) > bias_bound(0.3, 0.7, 1.0, geo, 2.0));
}

TEST_CASE("variance approximation matches a replicate Monte Carlo oracle") {
  // Flat kernel with lambda = 1 has xi_1 = xi_2 = 1 exactly; on a
  // two-dimensional design with unit weights the variance expression
  // sigma^2 / (n phi) must match the replicate variance of the normalized
  // kernel-weighted response average.
  const std::size_t reps = 500, n = 300, tau = 2;
  const BandwidthSchedule sched(0.0, 0.6, 1.0);
  const double sigma = 0.5;
  RegressionFunctionSpec m;
  m.coeffs = ContractionCoeffs::geometric(0.1, 1.0);  // keep the signal spread tiny

  std::vector<double> numer(reps);
  double phi_pool = 0.0;
  RngStream rng(2718, 0);
  const double thr = sched.lambda * sched.lambda;
  const auto inv_w = sched.inverse_weights(tau);
  const SeqPoint x = SeqPoint::zero(tau);
  for (std::size_t r = 0; r < reps; ++r) {
    double acc = 0.0;
    std::size_t inside = 0;
    for (std::size_t t = 0; t < n; ++t) {
      std::vector<double> xt(tau);
      for (auto& v : xt) v = rng.next_normal();
      const double y = m.eval(xt) + sigma * rng.next_normal();
      if (weighted_norm_sq(xt, x.view(), inv_w) <= thr) {
        acc += y;  // flat kernel weight 1/lambda = 1
        ++inside;
      }
    }
    numer[r] = acc / static_cast<double>(n);
    phi_pool += static_cast<double>(inside) / static_cast<double>(n);
  }
  phi_pool /= static_cast<double>(reps);

  // normalize by the pooled mean kernel weight (the E K_1 plug-in)
  double mean = 0.0;
  for (double v : numer) mean += v;
  mean /= static_cast<double>(reps);
  double s2 = 0.0;
  for (double v : numer) s2 += (v - mean) * (v - mean);
  s2 /= static_cast<double>(reps - 1);
  const double var_m2 = s2 / (phi_pool * phi_pool);

  XiEstimate xi;
  xi.xi1 = 1.0;
  xi.xi2 = 1.0;
  const double theory = variance_approx(sigma * sigma, xi, n, phi_pool);
  const double se = var_m2 * std::sqrt(2.0 / static_cast<double>(reps - 1));
  CHECK(std::abs(var_m2 - theory) <= 3.0 * se);
}

TEST_CASE("variance approximation arithmetic") {
  XiEstimate xi;
  xi.xi1 = 1.0;
  xi.xi2 = 1.0;
  CHECK(variance_approx(1.0, xi, 100, 0.1) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(variance_approx(1.0, xi, 200, 0.1) ==
        doctest::Approx(0.5 * variance_approx(1.0, xi, 100, 0.1)).epsilon(1e-15));
  CHECK_THROWS_AS(variance_approx(1.0, xi, 100, 0.0), DomainError);
}

TEST_CASE("standardize error") {
  CHECK(standardize_error(1.5, 1.0, 0.5, 100, 0.2, 2.0) == 0.0);
  const double z = standardize_error(1.7, 1.0, 0.5, 100, 0.2, 2.0);
  CHECK(standardize_error(0.3, 1.0, -0.5, 100, 0.2, 2.0) ==
        doctest::Approx(-z).epsilon(1e-12));
  CHECK_THROWS_AS(standardize_error(1.0, 0.0, 0.0, 10, 0.0, 1.0), DomainError);
}

TEST_CASE("clt rate factor variants") {
  const auto iid = rate_constants(DistSpec::exponential(1.0), 2.0, 1.0, RateVariant::IID);
  const double h = 0.3;
  const double expect_iid = std::pow(h, (1.0 + 2.0 * iid.rho * 2.0) / 3.0) *
                            std::exp(-iid.c_dstar * std::pow(h, -2.0 / 3.0));
  CHECK(clt_rate_factor(h, iid, 1.0, 2.0) == doctest::Approx(expect_iid).epsilon(1e-14));

  const auto a = std::vector<double>{1.0, 0.5, 0.25};
  const auto gau = rate_constants(DistSpec::chisq1(), 2.0, 1.0,
                                  RateVariant::GaussianDependent, a);
  const double expect_gau =
      std::pow(h, (1.0 - 2.0) / 3.0) *
      std::exp(-gau.c_dstar * std::pow(gau.c_a * h, -2.0 / 3.0));
  CHECK(clt_rate_factor(h, gau, 1.0, 2.0) == doctest::Approx(expect_gau).epsilon(1e-14));
}

}  // TEST_SUITE
