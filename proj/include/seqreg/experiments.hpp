#pragma once

// Monte Carlo harness: pointwise consistency, CLT shape, uniform
// consistency over the truncated cube, and small-ball rate validation.
// Runs are deterministic under a fixed master seed: replicate streams are
// derived from (experiment, n-index, replicate), never from the thread
// schedule, and output serialization is byte-stable.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqreg/datagen.hpp"
#include "seqreg/estimator.hpp"

namespace seqreg {

struct DesignConfig {
  enum class Process { IID, GaussianMA, NAR };

  Process process = Process::IID;
  DistSpec dist = DistSpec::chisq1();     // IID marginals
  std::vector<double> ma_coeffs;          // GaussianMA
  std::size_t tau = 25;
  std::size_t burn_in = 0;                // NAR
  double nar_sigma = 0.25;                // NAR innovation sd
  RegressionFunctionSpec m;
  double noise_sigma = 0.25;
};

struct ScheduleConfig {
  enum class Policy { FixedH, Balanced };

  double p = 2.0;
  Policy policy = Policy::FixedH;
  double h = 0.25;     // FixedH
  double beta = 1.0;   // smoothness driving the balanced-bandwidth rule
};

struct EvalConfig {
  enum class Kind { ZeroPoint, Points, CoverGrid };

  Kind kind = Kind::ZeroPoint;
  std::vector<SeqPoint> points;
  double grid_eta = 1.0;
  std::size_t grid_cap = 10'000'000;
};

struct ExperimentConfig {
  std::string experiment;  // consistency | clt | uniform | smallball
  DesignConfig design;
  KernelSpec kernel{KernelKind::EpanechnikovII, 1.0};
  ScheduleConfig sched;
  std::vector<std::size_t> n_grid;
  std::size_t replicates = 2;
  EvalConfig eval;
  std::uint64_t seed = 1;
  bool timing = false;  // wall-clock stamps are off by default: output stays byte-stable

  // smallball only
  std::vector<double> h_grid;
  std::size_t draws = 1'000'000;

  // parsed key/value pairs echoed into summaries
  std::vector<std::pair<std::string, std::string>> echo;
};

struct ResultRecord {
  std::string experiment;
  std::size_t n = 0;
  std::size_t replicate = 0;
  std::string point;
  double estimate = 0.0;
  double truth = 0.0;
  double abs_error = 0.0;
  bool empty_window = false;
  double phi_hat = 0.0;
  double elapsed_ms = 0.0;
};

struct RunOutput {
  std::vector<ResultRecord> records;
  nlohmann::ordered_json summary;
};

// Bandwidth for sample size n under the configured policy.
double bandwidth_for(const ScheduleConfig& sched, std::size_t n);

RunOutput run_consistency(const ExperimentConfig& cfg, unsigned threads = 1);
RunOutput run_clt(const ExperimentConfig& cfg, unsigned threads = 1);
RunOutput run_uniform(const ExperimentConfig& cfg, unsigned threads = 1);
RunOutput run_smallball_validation(const ExperimentConfig& cfg, unsigned threads = 1);

// Dispatch on cfg.experiment.
RunOutput run_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

// header: experiment,n,replicate,point,estimate,truth,abs_error,
//         empty_window,phi_hat,elapsed_ms
void write_records_csv(std::ostream& os, const std::vector<ResultRecord>& records);
std::string records_csv_string(const std::vector<ResultRecord>& records);

// Statistics helpers shared by the harness and its tests.
double normal_cdf(double x);
double ks_distance_to_normal(std::vector<double> sample);
double median(std::vector<double> values);
// Least squares y = intercept + slope * x.
std::pair<double, double> fit_line(const std::vector<double>& x,
                                   const std::vector<double>& y);

}  // namespace seqreg
