#include "seqreg/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "CLI11.hpp"
#include "seqreg/bandwidth.hpp"
#include "seqreg/config.hpp"
#include "seqreg/errors.hpp"
#include "seqreg/experiments.hpp"

namespace seqreg {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_error(std::ostream& err, const std::string& kind, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  err << j.dump() << "\n";
}

struct ExperimentArgs {
  std::string config_path;
  std::string out_dir = "seqreg_out";
  std::int64_t seed_override = -1;
  unsigned threads = 0;
};

int run_experiment_command(const std::string& name, const ExperimentArgs& args,
                           std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = load_experiment_config(args.config_path);
  if (cfg.experiment != name) {
    throw ConfigError("config declares experiment '" + cfg.experiment +
                      "' but subcommand is '" + name + "'");
  }
  if (args.seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed_override);
  unsigned threads = args.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  const RunOutput result = run_experiment(cfg, threads);

  namespace fs = std::filesystem;
  fs::create_directories(args.out_dir);
  const fs::path csv_path = fs::path(args.out_dir) / "results.csv";
  const fs::path json_path = fs::path(args.out_dir) / "summary.json";
  {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
    write_records_csv(csv, result.records);
  }
  {
    std::ofstream js(json_path, std::ios::binary);
    if (!js) throw std::runtime_error("cannot write " + json_path.string());
    js << result.summary.dump(2) << "\n";
  }
  out << "wrote " << csv_path.string() << " (" << result.records.size() << " records), "
      << json_path.string() << "\n";
  (void)err;
  return 0;
}

int run_constants(const std::string& dist_text, double p, double lambda,
                  const std::string& variant_text, const std::string& ma_text,
                  std::ostream& out) {
  const DistSpec dist = parse_dist(dist_text);
  RateVariant variant;
  if (variant_text == "iid") {
    variant = RateVariant::IID;
  } else if (variant_text == "gaussian") {
    variant = RateVariant::GaussianDependent;
  } else {
    throw ConfigError("constants: variant must be iid or gaussian");
  }
  std::vector<double> ma;
  if (!ma_text.empty()) {
    std::size_t pos = 0;
    while (pos < ma_text.size()) {
      std::size_t used = 0;
      ma.push_back(std::stod(ma_text.substr(pos), &used));
      pos += used;
      if (pos < ma_text.size() && ma_text[pos] == ',') ++pos;
    }
  }
  const RateConstants rc = rate_constants(dist, p, lambda, variant, ma);
  out << "dist = " << dist.name() << "\n";
  out << "p = " << fmt(p) << "\n";
  out << "lambda = " << fmt(lambda) << "\n";
  out << "variant = " << (variant == RateVariant::IID ? "iid" : "gaussian") << "\n";
  out << "rho = " << fmt(rc.rho) << "\n";
  out << "c_ell = " << fmt(rc.c_ell) << "\n";
  out << "zeta = " << (rc.zeta ? fmt(*rc.zeta) : "absent") << "\n";
  out << "c_star = " << fmt(rc.c_star) << "\n";
  out << "c_dstar = " << fmt(rc.c_dstar) << "\n";
  out << "c_a = " << fmt(rc.c_a) << "\n";
  return 0;
}

int run_bandwidth(double p, double beta, const std::vector<std::uint64_t>& ns,
                  std::ostream& out) {
  out << "n,a_opt_pointwise,a_opt_uniform,h_opt\n";
  for (std::uint64_t n : ns) {
    const double ap = a_opt_pointwise(n, beta, p);
    const double au = a_opt_uniform(n, beta, p);
    out << n << "," << fmt(ap) << "," << fmt(au) << "," << fmt(h_opt(n, ap)) << "\n";
  }
  return 0;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err) {
  CLI::App app{"sequence-space kernel regression experiments"};
  app.require_subcommand(1);

  ExperimentArgs exp_args;
  const std::vector<std::string> experiment_names = {"consistency", "clt", "uniform",
                                                     "smallball"};
  std::vector<CLI::App*> exp_cmds;
  for (const auto& name : experiment_names) {
    CLI::App* cmd = app.add_subcommand(name, "run the " + name + " experiment");
    cmd->add_option("--config", exp_args.config_path, "experiment config file")->required();
    cmd->add_option("--out", exp_args.out_dir, "output directory");
    cmd->add_option("--seed", exp_args.seed_override, "master seed override");
    cmd->add_option("--threads", exp_args.threads,
                    "parallelism degree (default: hardware)");
    exp_cmds.push_back(cmd);
  }

  std::string dist_text, variant_text = "iid", ma_text;
  double p = 2.0, lambda = 1.0, beta = 1.0;
  CLI::App* constants_cmd = app.add_subcommand("constants", "print a rate-constant bundle");
  constants_cmd->add_option("--dist", dist_text, "distribution of X^2, e.g. exp:1")
      ->required();
  constants_cmd->add_option("--p", p, "bandwidth exponent")->required();
  constants_cmd->add_option("--lambda", lambda, "kernel support radius");
  constants_cmd->add_option("--variant", variant_text, "iid | gaussian");
  constants_cmd->add_option("--ma", ma_text, "comma-separated MA coefficients");

  std::vector<std::uint64_t> ns;
  CLI::App* bandwidth_cmd = app.add_subcommand("bandwidth", "print optimal-bandwidth tables");
  bandwidth_cmd->add_option("--p", p, "bandwidth exponent")->required();
  bandwidth_cmd->add_option("--beta", beta, "smoothness")->required();
  bandwidth_cmd->add_option("--n", ns, "sample sizes")->required()->delimiter(',');

  try {
    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    print_error(err, "ConfigError", e.what());
    return 2;
  }

  try {
    for (std::size_t i = 0; i < exp_cmds.size(); ++i) {
      if (exp_cmds[i]->parsed()) {
        return run_experiment_command(experiment_names[i], exp_args, out, err);
      }
    }
    if (constants_cmd->parsed()) {
      return run_constants(dist_text, p, lambda, variant_text, ma_text, out);
    }
    if (bandwidth_cmd->parsed()) {
      return run_bandwidth(p, beta, ns, out);
    }
    print_error(err, "ConfigError", "no subcommand given");
    return 2;
  } catch (const ConfigError& e) {
    print_error(err, "ConfigError", e.what());
    return 2;
  } catch (const DomainError& e) {
    print_error(err, "ConfigError", e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error(err, "RuntimeFailure", e.what());
    return 1;
  }
}

}  // namespace seqreg
