#include "seqreg/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "seqreg/errors.hpp"

namespace seqreg {

namespace {

struct RawValue {
  std::string text;   // unquoted scalar or raw list body
  bool is_list = false;
};

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string strip_comment(const std::string& line) {
  bool in_quote = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_quote = !in_quote;
    if (line[i] == '#' && !in_quote) return line.substr(0, i);
  }
  return line;
}

class KvDoc {
 public:
  explicit KvDoc(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      line = trim(strip_comment(line));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') {
          throw ConfigError("config line " + std::to_string(lineno) + ": malformed section");
        }
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty()) {
          throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
        }
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
      }
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key.empty() || value.empty()) {
        throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
      }
      const std::string full = section.empty() ? key : section + "." + key;
      RawValue rv;
      if (value.front() == '[') {
        if (value.back() != ']') {
          throw ConfigError("config line " + std::to_string(lineno) + ": unterminated list");
        }
        rv.is_list = true;
        rv.text = trim(value.substr(1, value.size() - 2));
      } else if (value.front() == '"') {
        if (value.size() < 2 || value.back() != '"') {
          throw ConfigError("config line " + std::to_string(lineno) + ": unterminated string");
        }
        rv.text = value.substr(1, value.size() - 2);
      } else {
        rv.text = value;
      }
      if (!values_.emplace(full, rv).second) {
        throw ConfigError("config: duplicate key " + full);
      }
      order_.emplace_back(full, value);
    }
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string str(const std::string& key) {
    return fetch(key, false).text;
  }

  double num(const std::string& key) {
    const std::string t = fetch(key, false).text;
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config: key " + key + " is not numeric: " + t);
    }
  }

  std::uint64_t uint(const std::string& key) {
    const double v = num(key);
    if (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v))) {
      throw ConfigError("config: key " + key + " must be a nonnegative integer");
    }
    return static_cast<std::uint64_t>(v);
  }

  bool boolean(const std::string& key) {
    const std::string t = fetch(key, false).text;
    if (t == "true") return true;
    if (t == "false") return false;
    throw ConfigError("config: key " + key + " must be true or false");
  }

  std::vector<double> list(const std::string& key) {
    const RawValue rv = fetch(key, true);
    std::vector<double> out;
    std::string body = rv.text;
    std::size_t pos = 0;
    while (pos < body.size()) {
      while (pos < body.size() &&
             (std::isspace(static_cast<unsigned char>(body[pos])) || body[pos] == ',')) {
        ++pos;
      }
      if (pos >= body.size()) break;
      std::size_t used = 0;
      try {
        out.push_back(std::stod(body.substr(pos), &used));
      } catch (const std::exception&) {
        throw ConfigError("config: key " + key + " has a non-numeric element");
      }
      pos += used;
    }
    if (out.empty()) throw ConfigError("config: key " + key + " is an empty list");
    return out;
  }

  void reject_unconsumed() const {
    for (const auto& [k, v] : values_) {
      if (!consumed_.count(k)) throw ConfigError("config: unknown key " + k);
    }
  }

  const std::vector<std::pair<std::string, std::string>>& order() const { return order_; }

 private:
  RawValue fetch(const std::string& key, bool want_list) {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("config: missing key " + key);
    if (it->second.is_list != want_list) {
      throw ConfigError("config: key " + key +
                        (want_list ? " must be a list" : " must be a scalar"));
    }
    consumed_.insert(key);
    return it->second;
  }

  std::map<std::string, RawValue> values_;
  std::set<std::string> consumed_;
  std::vector<std::pair<std::string, std::string>> order_;
};

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  KvDoc doc(text);
  ExperimentConfig cfg;

  if (doc.uint("schema") != 1) throw ConfigError("config: unsupported schema version");
  cfg.experiment = doc.str("experiment");
  if (cfg.experiment != "consistency" && cfg.experiment != "clt" &&
      cfg.experiment != "uniform" && cfg.experiment != "smallball") {
    throw ConfigError("config: unknown experiment " + cfg.experiment);
  }

  // design
  const std::string process = doc.str("design.process");
  if (process == "iid") {
    cfg.design.process = DesignConfig::Process::IID;
    cfg.design.dist = parse_dist(doc.str("design.dist"));
  } else if (process == "gaussian_ma") {
    cfg.design.process = DesignConfig::Process::GaussianMA;
    if (doc.has("design.ma_geometric")) {
      cfg.design.ma_coeffs = geometric_ma_coeffs(doc.num("design.ma_geometric"));
    } else {
      cfg.design.ma_coeffs = doc.list("design.ma_coeffs");
    }
  } else if (process == "nar") {
    cfg.design.process = DesignConfig::Process::NAR;
    if (doc.has("design.burn_in")) cfg.design.burn_in = doc.uint("design.burn_in");
    cfg.design.nar_sigma = doc.num("design.nar_sigma");
  } else {
    throw ConfigError("config: unknown process " + process);
  }
  cfg.design.tau = doc.uint("design.tau");
  if (cfg.design.tau == 0) throw ConfigError("config: design.tau must be positive");
  if (cfg.experiment != "smallball") {
    cfg.design.noise_sigma = doc.num("design.noise_sigma");
  }

  // regression surface (not used by smallball runs)
  if (cfg.experiment != "smallball") {
    const double c0 = doc.num("regression.c0");
    const double gamma = doc.num("regression.gamma");
    cfg.design.m.coeffs = ContractionCoeffs::geometric(c0, gamma);
    const std::string link = doc.str("regression.link");
    if (link == "identity") {
      cfg.design.m.link = RegressionFunctionSpec::Link::Identity;
    } else if (link == "tanh") {
      cfg.design.m.link = RegressionFunctionSpec::Link::Tanh;
    } else {
      throw ConfigError("config: unknown link " + link);
    }
    cfg.design.m.beta = doc.num("regression.beta");
  }

  // kernel
  cfg.kernel = KernelSpec(kernel_from_name(doc.str("kernel.kind")), doc.num("kernel.lambda"));

  // schedule; smallball sweeps its own h grid and needs only the exponent
  cfg.sched.p = doc.num("schedule.p");
  if (cfg.experiment != "smallball") {
    const std::string policy = doc.str("schedule.policy");
    if (policy == "fixed") {
      cfg.sched.policy = ScheduleConfig::Policy::FixedH;
      cfg.sched.h = doc.num("schedule.h");
    } else if (policy == "balanced") {
      cfg.sched.policy = ScheduleConfig::Policy::Balanced;
      cfg.sched.beta = doc.num("schedule.beta");
    } else {
      throw ConfigError("config: unknown bandwidth policy " + policy);
    }
  }

  // run
  if (cfg.experiment == "smallball") {
    cfg.h_grid = doc.list("run.h_grid");
    cfg.draws = doc.uint("run.draws");
    cfg.n_grid = {cfg.draws};
  } else {
    for (double v : doc.list("run.n_grid")) {
      if (v <= 0 || v != std::floor(v)) {
        throw ConfigError("config: run.n_grid must hold positive integers");
      }
      cfg.n_grid.push_back(static_cast<std::size_t>(v));
    }
    cfg.replicates = doc.uint("run.replicates");
  }
  cfg.seed = doc.uint("run.seed");
  if (doc.has("run.timing")) cfg.timing = doc.boolean("run.timing");

  if (cfg.experiment == "consistency" || cfg.experiment == "clt" ||
      cfg.experiment == "uniform") {
    const std::string eval = doc.has("run.eval") ? doc.str("run.eval") : "zero";
    if (eval == "zero") {
      cfg.eval.kind = EvalConfig::Kind::ZeroPoint;
    } else if (eval == "grid") {
      cfg.eval.kind = EvalConfig::Kind::CoverGrid;
      cfg.eval.grid_eta = doc.num("run.grid_eta");
      if (doc.has("run.grid_cap")) cfg.eval.grid_cap = doc.uint("run.grid_cap");
    } else {
      throw ConfigError("config: unknown eval mode " + eval);
    }
  }
  if (cfg.experiment == "uniform") {
    // The covering grid is the supremum evaluation set.
    cfg.eval.kind = EvalConfig::Kind::CoverGrid;
    cfg.eval.grid_eta = doc.num("run.grid_eta");
    if (doc.has("run.grid_cap")) cfg.eval.grid_cap = doc.uint("run.grid_cap");
  }

  doc.reject_unconsumed();
  cfg.echo = doc.order();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

}  // namespace seqreg
