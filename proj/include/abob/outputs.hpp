#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "abob/config.hpp"
#include "abob/runner.hpp"
#include "abob/stats.hpp"

namespace abob {

// Creates the output directory and opens the file for writing; failing
// early here is what lets the CLI validate every path before any run starts.
inline std::ofstream open_output_file(const std::filesystem::path& dir,
                                      const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() +
                                   ": " + ec.message());
  const auto path = dir / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path.string());
  return out;
}

inline std::string format_value(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.10g", v);
  return buffer;
}

inline void write_trajectory_header(std::ostream& out) {
  out << "run_id,t,cluster,arm,reward,cum_regret\n";
}

// Stride-uniform downsample to at most 10,000 rows per run, always keeping
// the final round.
inline void write_trajectory_rows(std::ostream& out, int run_id, const RunRecord& record) {
  const long long total = static_cast<long long>(record.steps.size());
  if (total == 0) return;
  const long long stride = std::max<long long>(1, (total + 9998) / 9999);
  for (long long i = 0; i < total; i += stride) {
    const auto& step = record.steps[i];
    out << run_id << ',' << step.t << ',' << step.cluster << ',' << step.arm << ','
        << format_value(step.reward) << ',' << format_value(record.regret[i]) << '\n';
  }
  if ((total - 1) % stride != 0) {
    const auto& step = record.steps[total - 1];
    out << run_id << ',' << step.t << ',' << step.cluster << ',' << step.arm << ','
        << format_value(step.reward) << ',' << format_value(record.regret[total - 1])
        << '\n';
  }
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "p,mean_regret,std_regret,repeats\n";
  for (const auto& row : rows) {
    if (!row.valid) continue;
    out << row.p << ',' << format_value(row.mean_regret) << ','
        << format_value(row.std_regret) << ',' << row.repeats << '\n';
  }
}

inline void write_lipschitz_csv(std::ostream& out, const std::vector<double>& ell) {
  out << "arm,ell\n";
  for (std::size_t arm = 0; arm < ell.size(); ++arm)
    out << arm << ',' << format_value(ell[arm]) << '\n';
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["env.kind"] = cfg.env_kind;
  j["env.k"] = cfg.k;
  j["env.d"] = cfg.d;
  j["env.delta"] = cfg.delta;
  j["env.best_arm"] = cfg.best_arm;
  j["env.base_phase"] = cfg.base_phase;
  j["env.sigma"] = cfg.sigma;
  j["env.clusters"] = cfg.env_clusters;
  j["env.arms_per_cluster"] = cfg.arms_per_cluster;
  j["env.gap_between"] = cfg.gap_between;
  j["env.gap_within"] = cfg.gap_within;
  j["env.mu_star"] = cfg.mu_star;
  j["env.trace_path"] = cfg.trace_path;
  j["env.reward"] = cfg.reward;
  j["env.reward_width"] = cfg.reward_width;
  j["algo.kind"] = cfg.algo_kind;
  j["algo.flat"] = cfg.flat_policy;
  j["algo.parent"] = cfg.parent_policy;
  j["algo.child"] = cfg.child_policy;
  j["algo.ucb_alpha"] = cfg.ucb_alpha;
  j["partition.method"] = cfg.partition_method;
  j["partition.p"] = cfg.p;
  j["partition.path"] = cfg.partition_path;
  j["run.horizon"] = cfg.horizon;
  j["run.repeats"] = cfg.repeats;
  j["run.seed"] = cfg.seed;
  j["run.workers"] = cfg.workers;
  j["run.regret"] = cfg.regret_mode;
  j["sweep.p_values"] = cfg.sweep_p;
  j["out.dir"] = cfg.out_dir;
  j["lipschitz.neighbors"] = cfg.neighbors;
  j["lipschitz.shuffles"] = cfg.shuffles;
  return j;
}

struct Comparison {
  std::string label;
  double t = 0.0;
  double p_value = 1.0;
};

inline nlohmann::json build_summary_json(const ExperimentConfig& cfg,
                                         const std::vector<std::string>& warnings,
                                         const std::vector<Comparison>& comparisons,
                                         double wall_seconds) {
  nlohmann::json j;
  j["config"] = config_to_json(cfg);
  j["seed"] = cfg.seed;
  j["warnings"] = warnings;
  j["t_tests"] = nlohmann::json::array();
  for (const auto& c : comparisons)
    j["t_tests"].push_back({{"comparison", c.label}, {"t", c.t}, {"p_value", c.p_value}});
  j["wall_clock_seconds"] = wall_seconds;
  return j;
}

}  // namespace abob
