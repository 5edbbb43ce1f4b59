#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "abob/grid.hpp"
#include "abob/policy.hpp"

namespace abob {

// Configuration problem: reported with exit code 2 by the CLI, as opposed
// to runtime failures (exit code 3).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  // env.*
  std::string env_kind = "stochastic_gap";  // stochastic_gap|phased|traveling|clustered_gap|trace
  int k = 256;
  int d = 1;
  double delta = 0.1;
  int best_arm = 0;
  long long base_phase = 50;
  double sigma = -1.0;  // traveling; negative = default (grid spacing / 100)
  int env_clusters = 16;
  int arms_per_cluster = 16;
  double gap_between = 0.2;
  double gap_within = 0.05;
  double mu_star = 0.9;
  std::string trace_path;
  std::string reward = "bernoulli";  // bernoulli|uniform|mean
  double reward_width = -1.0;        // uniform; negative = grid spacing for traveling

  // algo.*
  std::string algo_kind = "flat";  // flat|abob
  std::string flat_policy = "tsallis";
  std::string parent_policy = "tsallis";
  std::string child_policy = "tsallis";
  double ucb_alpha = 1.4142135623730951;

  // partition.*
  std::string partition_method = "grid";  // grid|kmeans|shuffled|roundrobin|blocks|file
  int p = 16;
  std::string partition_path;

  // run.*
  long long horizon = 100000;
  int repeats = 10;
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = hardware concurrency
  std::string regret_mode = "mean";  // mean|realized

  // sweep.*
  std::vector<int> sweep_p;  // empty = powers of two up to k

  // out.*
  std::string out_dir = "out";

  // lipschitz.*
  int neighbors = 4;
  int shuffles = 10;

  std::set<std::string> seen;  // keys explicitly present in the config file

  bool was_set(const std::string& key) const { return seen.count(key) > 0; }
};

namespace detail {

inline long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected integer, got '" + value + "'");
  }
}

inline double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected number, got '" + value + "'");
  }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected unsigned integer, got '" + value + "'");
  }
}

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace detail

// Applies one `section.key = value` assignment. Unknown keys are hard errors.
inline void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                               const std::string& value) {
  using detail::parse_int;
  using detail::parse_real;
  using detail::parse_u64;
  if (key == "env.kind") cfg.env_kind = value;
  else if (key == "env.k") cfg.k = static_cast<int>(parse_int(key, value));
  else if (key == "env.d") cfg.d = static_cast<int>(parse_int(key, value));
  else if (key == "env.delta") cfg.delta = parse_real(key, value);
  else if (key == "env.best_arm") cfg.best_arm = static_cast<int>(parse_int(key, value));
  else if (key == "env.base_phase") cfg.base_phase = parse_int(key, value);
  else if (key == "env.sigma") cfg.sigma = parse_real(key, value);
  else if (key == "env.clusters") cfg.env_clusters = static_cast<int>(parse_int(key, value));
  else if (key == "env.arms_per_cluster")
    cfg.arms_per_cluster = static_cast<int>(parse_int(key, value));
  else if (key == "env.gap_between") cfg.gap_between = parse_real(key, value);
  else if (key == "env.gap_within") cfg.gap_within = parse_real(key, value);
  else if (key == "env.mu_star") cfg.mu_star = parse_real(key, value);
  else if (key == "env.trace_path") cfg.trace_path = value;
  else if (key == "env.reward") cfg.reward = value;
  else if (key == "env.reward_width") cfg.reward_width = parse_real(key, value);
  else if (key == "algo.kind") cfg.algo_kind = value;
  else if (key == "algo.flat") cfg.flat_policy = value;
  else if (key == "algo.parent") cfg.parent_policy = value;
  else if (key == "algo.child") cfg.child_policy = value;
  else if (key == "algo.ucb_alpha") cfg.ucb_alpha = parse_real(key, value);
  else if (key == "partition.method") cfg.partition_method = value;
  else if (key == "partition.p") cfg.p = static_cast<int>(parse_int(key, value));
  else if (key == "partition.path") cfg.partition_path = value;
  else if (key == "run.horizon") cfg.horizon = parse_int(key, value);
  else if (key == "run.repeats") cfg.repeats = static_cast<int>(parse_int(key, value));
  else if (key == "run.seed") cfg.seed = parse_u64(key, value);
  else if (key == "run.workers") cfg.workers = static_cast<int>(parse_int(key, value));
  else if (key == "run.regret") cfg.regret_mode = value;
  else if (key == "sweep.p_values") {
    cfg.sweep_p.clear();
    std::stringstream list(value);
    std::string item;
    while (std::getline(list, item, ','))
      cfg.sweep_p.push_back(static_cast<int>(parse_int(key, detail::trim(item))));
    if (cfg.sweep_p.empty()) throw ConfigError("config key 'sweep.p_values': empty list");
  } else if (key == "out.dir") cfg.out_dir = value;
  else if (key == "lipschitz.neighbors") cfg.neighbors = static_cast<int>(parse_int(key, value));
  else if (key == "lipschitz.shuffles") cfg.shuffles = static_cast<int>(parse_int(key, value));
  else throw ConfigError("unknown config key '" + key + "'");
  cfg.seen.insert(key);
}

// Parses `key = value` lines; '#' starts a comment; blank lines are ignored.
inline ExperimentConfig parse_config_text(const std::string& text,
                                          const std::string& source_name = "<config>") {
  ExperimentConfig cfg;
  std::stringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source_name + ":" + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(source_name + ":" + std::to_string(line_no) + ": empty key or value");
    apply_config_entry(cfg, key, value);
  }
  return cfg;
}

inline ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

// Cross-field validation. Returns human-readable warnings (non-fatal);
// throws ConfigError on any violation. `trace_arms` carries the arm count of
// an already-loaded trace when env.kind = trace (pass 0 to skip trace rules).
inline std::vector<std::string> validate_config(const ExperimentConfig& cfg,
                                                int trace_arms = 0) {
  std::vector<std::string> warnings;
  const auto fail = [](const std::string& msg) { throw ConfigError(msg); };

  static const std::set<std::string> kEnvKinds = {"stochastic_gap", "phased", "traveling",
                                                  "clustered_gap", "trace"};
  if (!kEnvKinds.count(cfg.env_kind)) fail("env.kind '" + cfg.env_kind + "' is not one of stochastic_gap|phased|traveling|clustered_gap|trace");
  if (cfg.horizon < 1) fail("run.horizon must be >= 1");
  if (cfg.repeats < 1) fail("run.repeats must be >= 1");
  if (cfg.workers < 0) fail("run.workers must be >= 0");
  if (cfg.regret_mode != "mean" && cfg.regret_mode != "realized")
    fail("run.regret must be mean|realized");
  if (cfg.reward != "bernoulli" && cfg.reward != "uniform" && cfg.reward != "mean")
    fail("env.reward must be bernoulli|uniform|mean");

  int arms = cfg.k;
  if (cfg.env_kind == "trace") {
    if (cfg.trace_path.empty()) fail("env.kind = trace requires env.trace_path");
    if (trace_arms > 0) arms = trace_arms;
    if (cfg.was_set("env.reward") && cfg.reward != "mean")
      fail("trace replay is deterministic; omit env.reward or set it to mean");
  } else {
    if (cfg.k < 1) fail("env.k must be >= 1");
  }

  if (cfg.env_kind == "stochastic_gap" || cfg.env_kind == "phased") {
    if (!(cfg.delta >= 0.0 && cfg.delta <= 1.0)) fail("env.delta must be in [0,1]");
    if (cfg.best_arm < 0 || cfg.best_arm >= arms) fail("env.best_arm out of range");
    if (cfg.env_kind == "phased" && cfg.base_phase < 1) fail("env.base_phase must be >= 1");
  }
  if (cfg.env_kind == "traveling") {
    if (cfg.d < 1 || cfg.d > 3) fail("env.d must be 1, 2, or 3");
    if (integer_root(arms, cfg.d) < 2)
      fail("env.k = " + std::to_string(arms) + " is not m^d with m >= 2 for d = " +
           std::to_string(cfg.d));
  }
  if (cfg.env_kind == "clustered_gap") {
    if (cfg.env_clusters < 1 || cfg.arms_per_cluster < 1)
      fail("env.clusters and env.arms_per_cluster must be >= 1");
    if (arms != cfg.env_clusters * cfg.arms_per_cluster)
      fail("env.k must equal env.clusters * env.arms_per_cluster");
    if (!(cfg.mu_star <= 1.0) || cfg.mu_star - cfg.gap_between - cfg.gap_within < 0.0)
      fail("clustered_gap means escape [0,1]: lower mu_star or the gaps");
  }
  if (cfg.reward == "uniform" && cfg.reward_width < 0.0 && cfg.env_kind != "traveling")
    fail("env.reward = uniform requires env.reward_width for this environment");

  if (cfg.algo_kind != "flat" && cfg.algo_kind != "abob")
    fail("algo.kind must be flat|abob");
  parse_policy_kind(cfg.algo_kind == "flat" ? cfg.flat_policy : cfg.parent_policy);
  if (cfg.algo_kind == "abob") parse_policy_kind(cfg.child_policy);
  if (!(cfg.ucb_alpha >= 0.0)) fail("algo.ucb_alpha must be >= 0");

  if (cfg.algo_kind == "abob") {
    static const std::set<std::string> kMethods = {"grid", "kmeans", "shuffled",
                                                   "roundrobin", "blocks", "file"};
    if (!kMethods.count(cfg.partition_method))
      fail("partition.method '" + cfg.partition_method +
           "' is not one of grid|kmeans|shuffled|roundrobin|blocks|file");
    if (cfg.partition_method == "file") {
      if (cfg.partition_path.empty()) fail("partition.method = file requires partition.path");
    } else {
      if (cfg.p < 1 || cfg.p > arms) fail("partition.p must be in [1, k]");
      if ((cfg.partition_method == "grid" || cfg.partition_method == "kmeans") &&
          cfg.env_kind != "traveling")
        fail("partition.method = " + cfg.partition_method +
             " needs arm positions; only the traveling environment provides them");
      if (cfg.partition_method == "grid") {
        const int side = integer_root(arms, cfg.d);
        const int block_side = integer_root(cfg.p, cfg.d);
        if (block_side < 1 || side % block_side != 0)
          fail("partition.p = " + std::to_string(cfg.p) +
               " does not tile the grid; p must be m^d with m dividing " +
               std::to_string(side));
      }
      if (cfg.partition_method != "grid" && cfg.partition_method != "kmeans" &&
          arms % cfg.p != 0)
        fail("partition.p must divide env.k for method " + cfg.partition_method);
    }
    if (cfg.parent_policy == "ucb1" &&
        (cfg.env_kind == "phased" || cfg.env_kind == "traveling" || cfg.env_kind == "trace"))
      warnings.push_back("ucb1 parent over a nonstationary environment: cluster rewards "
                         "shift while children explore; expect degraded regret");
  }

  for (int p : cfg.sweep_p)
    if (p < 1 || p > arms) fail("sweep.p_values entries must be in [1, k]");

  if (cfg.neighbors < 1 || (arms > 1 && cfg.neighbors >= arms))
    fail("lipschitz.neighbors must satisfy 1 <= n < k");
  if (cfg.shuffles < 1) fail("lipschitz.shuffles must be >= 1");

  return warnings;
}

// Powers of two 1, 2, 4, ..., k (requires k to be a power of two).
inline std::vector<int> default_sweep_values(int arms) {
  if (arms < 1 || (arms & (arms - 1)) != 0)
    throw ConfigError("sweep.p_values required: env.k = " + std::to_string(arms) +
                      " is not a power of two, so no default sweep exists");
  std::vector<int> values;
  for (int p = 1; p <= arms; p *= 2) values.push_back(p);
  return values;
}

}  // namespace abob
