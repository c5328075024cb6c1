#include "seqreg/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <thread>

#include "seqreg/bandwidth.hpp"
#include "seqreg/errors.hpp"

namespace seqreg {

namespace {

using json = nlohmann::ordered_json;

// Stream derivation: replicate-indexed, independent of the thread
// schedule. Layout: tag(8) | n-index(16) | replicate(32) | phase(8).
constexpr std::uint64_t kPhaseRegressors = 0;
constexpr std::uint64_t kPhaseResponse = 1;
constexpr std::uint64_t kPhaseXi = 2;

std::uint64_t stream_id(std::uint64_t tag, std::uint64_t n_index, std::uint64_t replicate,
                        std::uint64_t phase) {
  return (tag << 56) | (n_index << 40) | (replicate << 8) | phase;
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const unsigned t_use = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(t_use);
  for (unsigned t = 0; t < t_use; ++t) {
    pool.emplace_back([&, t]() {
      for (std::size_t i = t; i < count; i += t_use) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct Dataset {
  RegressionSample sample;
};

Dataset make_dataset(const DesignConfig& design, std::size_t n, std::uint64_t seed,
                     std::uint64_t tag, std::uint64_t n_index, std::uint64_t replicate,
                     std::size_t tau_override = 0) {
  const std::size_t tau = tau_override ? tau_override : design.tau;
  Dataset out;
  switch (design.process) {
    case DesignConfig::Process::IID: {
      auto spec = ProcessSpec::iid(design.dist, tau);
      out.sample.x = gen_iid(spec, n, seed, stream_id(tag, n_index, replicate, kPhaseRegressors));
      out.sample.y = gen_response(out.sample.x, design.m, design.noise_sigma, seed,
                                  stream_id(tag, n_index, replicate, kPhaseResponse));
      out.sample.origin = RegressionSample::Origin::Static;
      break;
    }
    case DesignConfig::Process::GaussianMA: {
      auto spec = ProcessSpec::gaussian_ma(design.ma_coeffs, tau);
      out.sample.x =
          gen_gaussian_ma(spec, n, seed, stream_id(tag, n_index, replicate, kPhaseRegressors));
      out.sample.y = gen_response(out.sample.x, design.m, design.noise_sigma, seed,
                                  stream_id(tag, n_index, replicate, kPhaseResponse));
      out.sample.origin = RegressionSample::Origin::Static;
      break;
    }
    case DesignConfig::Process::NAR: {
      auto spec = ProcessSpec::nar(design.nar_sigma, tau, design.burn_in);
      auto nar = gen_nar(spec, design.m, n, seed,
                         stream_id(tag, n_index, replicate, kPhaseRegressors));
      out.sample = std::move(nar.sample);
      break;
    }
  }
  return out;
}

std::vector<SeqPoint> resolve_eval_points(const ExperimentConfig& cfg, std::size_t tau) {
  switch (cfg.eval.kind) {
    case EvalConfig::Kind::ZeroPoint:
      return {SeqPoint::zero(tau)};
    case EvalConfig::Kind::Points:
      return cfg.eval.points;
    case EvalConfig::Kind::CoverGrid: {
      TruncSet set(tau, cfg.kernel.lambda);
      return cover_grid(set, cfg.eval.grid_eta, cfg.eval.grid_cap);
    }
  }
  return {};
}

json config_echo(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = cfg.experiment;
  switch (cfg.design.process) {
    case DesignConfig::Process::IID: j["process"] = "iid"; break;
    case DesignConfig::Process::GaussianMA: j["process"] = "gaussian_ma"; break;
    case DesignConfig::Process::NAR: j["process"] = "nar"; break;
  }
  j["dist"] = cfg.design.dist.name();
  if (!cfg.design.ma_coeffs.empty()) j["ma_coeffs"] = cfg.design.ma_coeffs;
  j["tau"] = cfg.design.tau;
  if (cfg.design.process == DesignConfig::Process::NAR) {
    j["burn_in"] = cfg.design.burn_in;
    j["nar_sigma"] = cfg.design.nar_sigma;
  }
  j["m_link"] =
      cfg.design.m.link == RegressionFunctionSpec::Link::Identity ? "identity" : "tanh";
  if (cfg.design.m.coeffs.is_geometric()) {
    j["m_c0"] = cfg.design.m.coeffs.c0;
    j["m_gamma"] = cfg.design.m.coeffs.gamma;
  } else {
    j["m_coeffs"] = cfg.design.m.coeffs.explicit_;
  }
  j["beta"] = cfg.design.m.beta;
  j["noise_sigma"] = cfg.design.noise_sigma;
  j["kernel"] = kernel_name(cfg.kernel.kind);
  j["lambda"] = cfg.kernel.lambda;
  j["p"] = cfg.sched.p;
  j["policy"] = cfg.sched.policy == ScheduleConfig::Policy::FixedH ? "fixed" : "balanced";
  if (cfg.sched.policy == ScheduleConfig::Policy::FixedH) j["h"] = cfg.sched.h;
  j["n_grid"] = cfg.n_grid;
  j["replicates"] = cfg.replicates;
  j["seed"] = cfg.seed;
  switch (cfg.eval.kind) {
    case EvalConfig::Kind::ZeroPoint: j["eval"] = "zero"; break;
    case EvalConfig::Kind::Points: j["eval"] = "points"; break;
    case EvalConfig::Kind::CoverGrid:
      j["eval"] = "grid";
      j["grid_eta"] = cfg.eval.grid_eta;
      break;
  }
  if (!cfg.h_grid.empty()) {
    j["h_grid"] = cfg.h_grid;
    j["draws"] = cfg.draws;
  }
  if (!cfg.echo.empty()) {
    json file;
    for (const auto& [k, v] : cfg.echo) file[k] = v;
    j["config_file"] = file;
  }
  return j;
}

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

RegressorSampler design_sampler(const DesignConfig& design, std::size_t tau) {
  switch (design.process) {
    case DesignConfig::Process::IID: {
      DistSpec dist = design.dist;
      return [dist](RngStream& rng, std::vector<double>& row) {
        for (auto& v : row) v = sample_marginal(dist, rng);
      };
    }
    case DesignConfig::Process::GaussianMA: {
      std::vector<double> a = design.ma_coeffs;
      return [a, tau](RngStream& rng, std::vector<double>& row) {
        const std::size_t order = a.size();
        std::vector<double> eps(tau + order - 1);
        for (auto& e : eps) e = rng.next_normal();
        for (std::size_t s = 0; s < tau; ++s) {
          double acc = 0.0;
          for (std::size_t j = 0; j < order; ++j) acc += a[j] * eps[order - 1 + s - j];
          row[s] = acc;
        }
      };
    }
    case DesignConfig::Process::NAR: {
      // Plug-in sampling from one simulated stationary path: consecutive
      // lag windows, refreshed when exhausted.
      auto m = design.m;
      double sigma = design.nar_sigma;
      auto state = std::make_shared<std::vector<double>>();
      auto pos = std::make_shared<std::size_t>(0);
      return [m, sigma, tau, state, pos](RngStream& rng, std::vector<double>& row) {
        if (state->size() < tau) {
          state->assign(tau, 0.0);
          for (std::size_t t = 0; t < std::max<std::size_t>(10 * tau, 1000); ++t) {
            const double y = m.eval(*state) + sigma * rng.next_normal();
            state->insert(state->begin(), y);
            state->resize(tau);
          }
        }
        const double y = m.eval(*state) + sigma * rng.next_normal();
        state->insert(state->begin(), y);
        state->resize(tau);
        row.assign(state->begin(), state->end());
        (void)pos;
      };
    }
  }
  return {};
}

RateVariant design_variant(const DesignConfig& design) {
  if (design.process == DesignConfig::Process::IID &&
      design.dist.family != DistFamily::ChiSq1) {
    return RateVariant::IID;
  }
  return RateVariant::GaussianDependent;
}

RateConstants design_rate_constants(const ExperimentConfig& cfg) {
  const RateVariant variant = design_variant(cfg.design);
  const DistSpec dist = variant == RateVariant::GaussianDependent
                            ? DistSpec::chisq1()
                            : cfg.design.dist;
  std::span<const double> ma;
  if (cfg.design.process == DesignConfig::Process::GaussianMA) ma = cfg.design.ma_coeffs;
  return rate_constants(dist, cfg.sched.p, cfg.kernel.lambda, variant, ma);
}

}  // namespace

double bandwidth_for(const ScheduleConfig& sched, std::size_t n) {
  if (sched.policy == ScheduleConfig::Policy::FixedH) return sched.h;
  return h_opt(n, a_opt_pointwise(n, sched.beta, sched.p));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_distance_to_normal(std::vector<double> sample) {
  if (sample.empty()) throw DomainError("ks_distance_to_normal: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = normal_cdf(sample[i]);
    const double hi = static_cast<double>(i + 1) / n - f;
    const double lo = f - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  if (values.size() % 2 == 1) return values[m];
  return 0.5 * (values[m - 1] + values[m]);
}

std::pair<double, double> fit_line(const std::vector<double>& x,
                                   const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_line: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) throw DomainError("fit_line: degenerate abscissa");
  const double slope = (n * sxy - sx * sy) / det;
  const double intercept = (sy - slope * sx) / n;
  return {intercept, slope};
}

RunOutput run_consistency(const ExperimentConfig& cfg, unsigned threads) {
  if (cfg.n_grid.empty()) throw DomainError("run_consistency: empty n grid");
  if (cfg.replicates < 2) throw DomainError("run_consistency: need >= 2 replicates");
  for (std::size_t i = 1; i < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] <= cfg.n_grid[i - 1]) {
      throw DomainError("run_consistency: n grid must be strictly increasing");
    }
  }
  constexpr std::uint64_t kTag = 1;

  RunOutput out;
  json per_n = json::array();
  std::vector<double> medians;

  const auto points = resolve_eval_points(cfg, cfg.design.tau);
  if (points.empty()) throw DomainError("run_consistency: no evaluation points");
  for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    const std::size_t n = cfg.n_grid[ni];
    const double h = bandwidth_for(cfg.sched, n);
    const BandwidthSchedule sched(cfg.sched.p, h, cfg.kernel.lambda);

    std::vector<std::vector<ResultRecord>> rep_records(cfg.replicates);
    parallel_for(cfg.replicates, threads, [&](std::size_t r) {
      const double t0 = cfg.timing ? now_ms() : 0.0;
      std::vector<ResultRecord> recs;
      try {
        Dataset ds = make_dataset(cfg.design, n, cfg.seed, kTag, ni, r);
        for (std::size_t pi = 0; pi < points.size(); ++pi) {
          ResultRecord rec;
          rec.experiment = cfg.experiment;
          rec.n = n;
          rec.replicate = r;
          rec.point = "p" + std::to_string(pi);
          rec.truth = cfg.design.m.eval(points[pi].view());
          const auto est = nw_estimate(ds.sample, points[pi], cfg.kernel, sched);
          if (est) {
            rec.estimate = est->value;
            rec.abs_error = std::abs(est->value - rec.truth);
            rec.phi_hat = static_cast<double>(est->denom_count) /
                          static_cast<double>(ds.sample.y.size());
          } else {
            rec.empty_window = true;
            rec.estimate = std::numeric_limits<double>::quiet_NaN();
            rec.abs_error = std::numeric_limits<double>::quiet_NaN();
          }
          recs.push_back(std::move(rec));
        }
      } catch (const std::exception&) {
        // Per-record failure never aborts the run; the replicate is
        // reported as an empty window with no estimate.
        ResultRecord rec;
        rec.experiment = cfg.experiment;
        rec.n = n;
        rec.replicate = r;
        rec.point = "error";
        rec.empty_window = true;
        rec.estimate = std::numeric_limits<double>::quiet_NaN();
        rec.truth = std::numeric_limits<double>::quiet_NaN();
        rec.abs_error = std::numeric_limits<double>::quiet_NaN();
        recs.assign(1, rec);
      }
      const double t1 = cfg.timing ? now_ms() : 0.0;
      for (auto& rec : recs) rec.elapsed_ms = t1 - t0;
      rep_records[r] = std::move(recs);
    });

    std::vector<double> errs;
    std::vector<std::vector<double>> per_point_errs(points.size());
    std::size_t empty = 0, total = 0;
    for (auto& recs : rep_records) {
      for (std::size_t pi = 0; pi < recs.size(); ++pi) {
        auto& rec = recs[pi];
        ++total;
        if (rec.empty_window) {
          ++empty;
        } else {
          errs.push_back(rec.abs_error);
          if (pi < per_point_errs.size()) per_point_errs[pi].push_back(rec.abs_error);
        }
        out.records.push_back(std::move(rec));
      }
    }
    json row;
    row["n"] = n;
    row["h"] = h;
    row["median_abs_error"] =
        errs.empty() ? std::numeric_limits<double>::quiet_NaN() : median(errs);
    if (points.size() > 1) {
      json per_point = json::array();
      for (const auto& pe : per_point_errs) {
        per_point.push_back(pe.empty() ? std::numeric_limits<double>::quiet_NaN()
                                       : median(pe));
      }
      row["median_abs_error_per_point"] = per_point;
    }
    row["empty_window_rate"] =
        static_cast<double>(empty) / static_cast<double>(std::max<std::size_t>(total, 1));
    per_n.push_back(row);
    medians.push_back(row["median_abs_error"].get<double>());
  }

  bool decreasing = medians.size() >= 2;
  for (std::size_t i = 1; i < medians.size(); ++i) {
    if (!(medians[i] < medians[i - 1])) decreasing = false;
  }

  out.summary["experiment"] = cfg.experiment;
  out.summary["config"] = config_echo(cfg);
  out.summary["per_n"] = per_n;
  out.summary["median_errors_decreasing"] = decreasing;
  return out;
}

RunOutput run_clt(const ExperimentConfig& cfg, unsigned threads) {
  if (cfg.replicates < 200) throw DomainError("run_clt: need >= 200 replicates");
  if (cfg.n_grid.size() != 1) throw DomainError("run_clt: exactly one n expected");
  constexpr std::uint64_t kTag = 2;

  const std::size_t n = cfg.n_grid.front();
  const double h = bandwidth_for(cfg.sched, n);
  const BandwidthSchedule sched(cfg.sched.p, h, cfg.kernel.lambda);
  const auto points = resolve_eval_points(cfg, cfg.design.tau);
  if (points.size() != 1) throw DomainError("run_clt: exactly one evaluation point expected");
  const SeqPoint& x = points.front();
  const double truth = cfg.design.m.eval(x.view());

  RunOutput out;
  std::vector<ResultRecord> recs(cfg.replicates);
  parallel_for(cfg.replicates, threads, [&](std::size_t r) {
    const double t0 = cfg.timing ? now_ms() : 0.0;
    ResultRecord rec;
    rec.experiment = cfg.experiment;
    rec.n = n;
    rec.replicate = r;
    rec.point = "p0";
    rec.truth = truth;
    try {
      Dataset ds = make_dataset(cfg.design, n, cfg.seed, kTag, 0, r);
      const auto est = nw_estimate(ds.sample, x, cfg.kernel, sched);
      if (est) {
        rec.estimate = est->value;
        rec.abs_error = std::abs(est->value - truth);
        rec.phi_hat = static_cast<double>(est->denom_count) /
                      static_cast<double>(ds.sample.y.size());
      } else {
        rec.empty_window = true;
        rec.estimate = std::numeric_limits<double>::quiet_NaN();
        rec.abs_error = std::numeric_limits<double>::quiet_NaN();
      }
    } catch (const std::exception&) {
      rec.empty_window = true;
      rec.estimate = std::numeric_limits<double>::quiet_NaN();
      rec.abs_error = std::numeric_limits<double>::quiet_NaN();
    }
    rec.elapsed_ms = cfg.timing ? now_ms() - t0 : 0.0;
    recs[r] = std::move(rec);
  });

  std::vector<double> errors;
  double phi_sum = 0.0;
  std::size_t empty = 0;
  for (const auto& rec : recs) {
    if (rec.empty_window) {
      ++empty;
    } else {
      errors.push_back(rec.estimate - rec.truth);
      phi_sum += rec.phi_hat;
    }
  }
  if (errors.size() < 2) throw DomainError("run_clt: too many empty windows");

  // Empirical restandardization: the unknown multiplicative constants
  // (p*(0), C_ell, xi) cancel in (e - mean) / sd.
  double mean = 0.0;
  for (double e : errors) mean += e;
  mean /= static_cast<double>(errors.size());
  double var = 0.0;
  for (double e : errors) var += (e - mean) * (e - mean);
  var /= static_cast<double>(errors.size() - 1);
  const double sd = std::sqrt(var);
  std::vector<double> z(errors.size());
  for (std::size_t i = 0; i < errors.size(); ++i) z[i] = (errors[i] - mean) / sd;
  const double ks = ks_distance_to_normal(z);
  const double ks_crit = 1.63 / std::sqrt(static_cast<double>(errors.size()));

  // Theory-scaled diagnostic: the limit-theorem normalization evaluated with
  // Monte Carlo xi and the analytic bias bound. Slope comparisons only;
  // the additive constant stays unknown.
  const RateConstants consts = design_rate_constants(cfg);
  const double rate_factor = clt_rate_factor(h, consts, cfg.kernel.lambda, cfg.sched.p);
  const double bias =
      bias_bound(h, cfg.design.m.beta, cfg.kernel.lambda, cfg.design.m.coeffs, cfg.sched.p);
  const auto sampler = design_sampler(cfg.design, cfg.design.tau);
  const XiEstimate xi = estimate_xi(cfg.kernel, sampler, cfg.design.tau, x, sched, 20'000,
                                    cfg.seed, stream_id(kTag, 0, 0, kPhaseXi));
  const double phi_bar = phi_sum / static_cast<double>(errors.size());
  const double sigma2 = cfg.design.noise_sigma * cfg.design.noise_sigma;
  double theory_scaled_var = std::numeric_limits<double>::quiet_NaN();
  if (phi_bar > 0.0 && sigma2 > 0.0) {
    // Plug-in limit variance: n * rate_factor * Var(mhat), with Var(mhat)
    // from the variance approximation at the observed phi. The unknown
    // p*(0) and C_ell live inside phi_bar and cancel from the ratio.
    const double v1_hat =
        variance_approx(sigma2, xi, n, phi_bar) * static_cast<double>(n) * rate_factor;
    std::vector<double> zt;
    zt.reserve(errors.size());
    for (double e : errors) {
      zt.push_back(standardize_error(e + truth, truth, bias, n, rate_factor, v1_hat));
    }
    double mt = 0.0;
    for (double t : zt) mt += t;
    mt /= static_cast<double>(zt.size());
    double vt = 0.0;
    for (double t : zt) vt += (t - mt) * (t - mt);
    theory_scaled_var = vt / static_cast<double>(zt.size() - 1);
  }

  out.records = std::move(recs);
  out.summary["experiment"] = cfg.experiment;
  out.summary["config"] = config_echo(cfg);
  out.summary["n"] = n;
  out.summary["h"] = h;
  out.summary["replicates_used"] = errors.size();
  out.summary["empty_windows"] = empty;
  out.summary["ks_distance"] = ks;
  out.summary["ks_critical_1pct"] = ks_crit;
  out.summary["ks_pass_1pct"] = ks < ks_crit;
  out.summary["mean_error"] = mean;
  out.summary["sd_error"] = sd;
  out.summary["bias_bound"] = bias;
  out.summary["phi_bar"] = phi_bar;
  out.summary["xi1"] = xi.xi1;
  out.summary["xi2"] = xi.xi2;
  out.summary["theory_scaled_var"] = theory_scaled_var;
  return out;
}

RunOutput run_uniform(const ExperimentConfig& cfg, unsigned threads) {
  if (cfg.n_grid.empty()) throw DomainError("run_uniform: empty n grid");
  if (cfg.replicates < 2) throw DomainError("run_uniform: need >= 2 replicates");
  constexpr std::uint64_t kTag = 3;

  RunOutput out;
  json per_n = json::array();
  std::vector<double> med_sups;
  std::vector<double> cor3_x;

  for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    const std::size_t n = cfg.n_grid[ni];
    // Effective dimension grows with the sample: tau = ceil(log n).
    const std::size_t tau =
        static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n))));
    const double h = bandwidth_for(cfg.sched, n);
    const BandwidthSchedule sched(cfg.sched.p, h, cfg.kernel.lambda);
    TruncSet set(tau, cfg.kernel.lambda);
    const auto grid = cover_grid(set, cfg.eval.grid_eta, cfg.eval.grid_cap);
    const auto inv_w = sched.inverse_weights(tau);
    const double thr = sched.lambda * sched.lambda;

    std::vector<double> truth(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      truth[g] = cfg.design.m.eval(grid[g].view());
    }

    std::vector<ResultRecord> recs(cfg.replicates);
    parallel_for(cfg.replicates, threads, [&](std::size_t r) {
      const double t0 = cfg.timing ? now_ms() : 0.0;
      ResultRecord rec;
      rec.experiment = cfg.experiment;
      rec.n = n;
      rec.replicate = r;
      rec.estimate = std::numeric_limits<double>::quiet_NaN();
      rec.truth = std::numeric_limits<double>::quiet_NaN();
      rec.abs_error = std::numeric_limits<double>::quiet_NaN();
      try {
        Dataset ds = make_dataset(cfg.design, n, cfg.seed, kTag, ni, r, tau);
        const std::size_t rows = ds.sample.y.size();

        double sup = -1.0;
        std::size_t arg = 0;
        double arg_phi = 0.0;
        double arg_est = 0.0;
        std::size_t empty_points = 0;
        for (std::size_t g = 0; g < grid.size(); ++g) {
          double numer = 0.0, denom = 0.0;
          std::size_t inside = 0;
          for (std::size_t t = 0; t < rows; ++t) {
            const double d2 = weighted_norm_sq(ds.sample.x.row(t), grid[g].view(), inv_w);
            if (d2 > thr) continue;
            ++inside;
            const double w = kernel_eval(cfg.kernel, std::sqrt(d2));
            numer += w * ds.sample.y[t];
            denom += w;
          }
          if (denom <= 0.0) {
            ++empty_points;
            continue;
          }
          const double est = numer / denom;
          const double err = std::abs(est - truth[g]);
          if (err > sup) {
            sup = err;
            arg = g;
            arg_est = est;
            arg_phi = static_cast<double>(inside) / static_cast<double>(rows);
          }
        }

        rec.point = "g" + std::to_string(arg);
        rec.empty_window = empty_points > 0;
        if (sup >= 0.0) {
          rec.abs_error = sup;
          rec.truth = truth[arg];
          rec.estimate = arg_est;
          rec.phi_hat = arg_phi;
        }
      } catch (const std::exception&) {
        rec.point = "error";
        rec.empty_window = true;
      }
      rec.elapsed_ms = cfg.timing ? now_ms() - t0 : 0.0;
      recs[r] = std::move(rec);
    });

    std::vector<double> sups;
    double empty_frac = 0.0;
    for (auto& rec : recs) {
      if (!std::isnan(rec.abs_error)) sups.push_back(rec.abs_error);
      if (rec.empty_window) empty_frac += 1.0;
      out.records.push_back(std::move(rec));
    }
    empty_frac /= static_cast<double>(cfg.replicates);

    json row;
    row["n"] = n;
    row["tau"] = tau;
    row["h"] = h;
    row["grid_points"] = grid.size();
    row["median_sup_error"] =
        sups.empty() ? std::numeric_limits<double>::quiet_NaN() : median(sups);
    row["replicates_with_empty_points"] = empty_frac;
    per_n.push_back(row);
    med_sups.push_back(row["median_sup_error"].get<double>());
    cor3_x.push_back(cfg.design.m.beta *
                     a_opt_pointwise(n, cfg.sched.beta, cfg.sched.p) *
                     std::log(std::log(static_cast<double>(n))));
  }

  bool decreasing = med_sups.size() >= 2;
  for (std::size_t i = 1; i < med_sups.size(); ++i) {
    if (!(med_sups[i] < med_sups[i - 1])) decreasing = false;
  }

  out.summary["experiment"] = cfg.experiment;
  out.summary["config"] = config_echo(cfg);
  out.summary["per_n"] = per_n;
  out.summary["sup_errors_decreasing"] = decreasing;
  // Rate comparison: log sup-error against beta * a_opt * loglog n
  // (slope near 1 when the predicted rate matches).
  if (med_sups.size() >= 2) {
    std::vector<double> logsup;
    for (double s : med_sups) logsup.push_back(std::log(s));
    const auto [c, slope] = fit_line(cor3_x, logsup);
    out.summary["rate_fit_slope"] = slope;
    out.summary["rate_fit_intercept"] = c;
  }
  return out;
}

RunOutput run_smallball_validation(const ExperimentConfig& cfg, unsigned threads) {
  if (cfg.h_grid.size() < 5) throw DomainError("run_smallball: h grid needs >= 5 points");
  for (std::size_t i = 1; i < cfg.h_grid.size(); ++i) {
    if (!(cfg.h_grid[i] > cfg.h_grid[i - 1])) {
      throw DomainError("run_smallball: h grid must be strictly increasing");
    }
  }
  if (cfg.draws < 1'000'000) throw DomainError("run_smallball: need >= 1e6 draws per point");
  if (cfg.design.process == DesignConfig::Process::NAR) {
    throw DomainError("run_smallball: NAR designs not supported");
  }
  constexpr std::uint64_t kTag = 4;

  const std::size_t tau = cfg.design.tau;
  const double lambda = cfg.kernel.lambda;
  const double p = cfg.sched.p;

  // Squared schedule weights j^{-2p}; the center is the origin.
  std::vector<double> w2(tau);
  for (std::size_t j = 0; j < tau; ++j) {
    w2[j] = std::pow(static_cast<double>(j + 1), -2.0 * p);
  }

  std::vector<double> phi(cfg.h_grid.size(), 0.0);
  parallel_for(cfg.h_grid.size(), threads, [&](std::size_t hi) {
    const double thr = cfg.h_grid[hi] * lambda * cfg.h_grid[hi] * lambda;
    RngStream rng(cfg.seed, stream_id(kTag, hi, 0, kPhaseRegressors));
    std::size_t hits = 0;
    if (cfg.design.process == DesignConfig::Process::IID) {
      const DistSpec dist = cfg.design.dist;
      for (std::size_t d = 0; d < cfg.draws; ++d) {
        double s = 0.0;
        for (std::size_t j = 0; j < tau; ++j) {
          const double x = sample_marginal(dist, rng);
          s += x * x * w2[j];
        }
        if (s <= thr) ++hits;
      }
    } else {
      const auto& a = cfg.design.ma_coeffs;
      const std::size_t order = a.size();
      std::vector<double> eps(tau + order - 1);
      for (std::size_t d = 0; d < cfg.draws; ++d) {
        for (auto& e : eps) e = rng.next_normal();
        double s = 0.0;
        for (std::size_t j = 0; j < tau; ++j) {
          double acc = 0.0;
          for (std::size_t l = 0; l < order; ++l) acc += a[l] * eps[order - 1 + j - l];
          s += acc * acc * w2[j];
        }
        if (s <= thr) ++hits;
      }
    }
    phi[hi] = static_cast<double>(hits) / static_cast<double>(cfg.draws);
  });

  if (phi.front() <= 0.0) {
    throw InsufficientHits(
        "run_smallball: empirical small ball vanished at the smallest h; raise the grid minimum");
  }

  const RateConstants consts = design_rate_constants(cfg);
  const double k = 2.0 / (2.0 * p - 1.0);
  const double poly = consts.variant == RateVariant::IID
                          ? (1.0 + 2.0 * consts.rho * p) / (2.0 * p - 1.0)
                          : (1.0 - p) / (2.0 * p - 1.0);

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < cfg.h_grid.size(); ++i) {
    if (phi[i] <= 0.0) continue;
    xs.push_back(std::pow(lambda * cfg.h_grid[i], -k));
    ys.push_back(std::log(phi[i]) - poly * std::log(lambda * cfg.h_grid[i]));
  }
  if (xs.size() < 2) throw InsufficientHits("run_smallball: not enough positive phi values");
  const auto [intercept, slope] = fit_line(xs, ys);
  const double theory_slope = consts.variant == RateVariant::IID
                                  ? -consts.c_dstar
                                  : -consts.c_dstar * std::pow(consts.c_a, -k);

  RunOutput out;
  for (std::size_t i = 0; i < cfg.h_grid.size(); ++i) {
    ResultRecord rec;
    rec.experiment = cfg.experiment;
    rec.n = cfg.draws;
    rec.replicate = i;
    char buf[32];
    std::snprintf(buf, sizeof buf, "h=%.17g", cfg.h_grid[i]);
    rec.point = buf;
    rec.estimate = phi[i];
    rec.truth = std::numeric_limits<double>::quiet_NaN();
    rec.abs_error = std::numeric_limits<double>::quiet_NaN();
    rec.empty_window = phi[i] <= 0.0;
    rec.phi_hat = phi[i];
    out.records.push_back(std::move(rec));
  }

  out.summary["experiment"] = cfg.experiment;
  out.summary["config"] = config_echo(cfg);
  out.summary["h_grid"] = cfg.h_grid;
  out.summary["phi_hat"] = phi;
  out.summary["fitted_slope"] = slope;
  out.summary["fitted_intercept"] = intercept;
  out.summary["theory_slope"] = theory_slope;
  out.summary["slope_rel_gap"] = std::abs(slope - theory_slope) / std::abs(theory_slope);
  out.summary["slope_negative"] = slope < 0.0;
  return out;
}

RunOutput run_experiment(const ExperimentConfig& cfg, unsigned threads) {
  if (cfg.experiment == "consistency") return run_consistency(cfg, threads);
  if (cfg.experiment == "clt") return run_clt(cfg, threads);
  if (cfg.experiment == "uniform") return run_uniform(cfg, threads);
  if (cfg.experiment == "smallball") return run_smallball_validation(cfg, threads);
  throw ConfigError("unknown experiment: " + cfg.experiment);
}

namespace {
void append_double(std::string& s, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  s += buf;
}
}  // namespace

std::string records_csv_string(const std::vector<ResultRecord>& records) {
  std::string s =
      "experiment,n,replicate,point,estimate,truth,abs_error,empty_window,phi_hat,elapsed_ms\n";
  for (const auto& r : records) {
    s += r.experiment;
    s += ',';
    s += std::to_string(r.n);
    s += ',';
    s += std::to_string(r.replicate);
    s += ',';
    s += r.point;
    s += ',';
    append_double(s, r.estimate);
    s += ',';
    append_double(s, r.truth);
    s += ',';
    append_double(s, r.abs_error);
    s += ',';
    s += r.empty_window ? '1' : '0';
    s += ',';
    append_double(s, r.phi_hat);
    s += ',';
    append_double(s, r.elapsed_ms);
    s += '\n';
  }
  return s;
}

void write_records_csv(std::ostream& os, const std::vector<ResultRecord>& records) {
  os << records_csv_string(records);
}

}  // namespace seqreg
