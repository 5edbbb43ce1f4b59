#pragma once

#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "abob/config.hpp"
#include "abob/environments.hpp"
#include "abob/hierarchy.hpp"
#include "abob/partitioning.hpp"
#include "abob/policies.hpp"
#include "abob/rng.hpp"
#include "abob/stats.hpp"

namespace abob {

struct StepLog {
  long long t;   // 1-based round
  int cluster;   // -1 for flat policies
  int arm;
  double reward; // realized draw
};

struct RunRecord {
  std::vector<StepLog> steps;    // length T when captured
  std::vector<double> regret;    // cumulative series, length T when captured
  double final_regret = 0.0;
  std::vector<double> mean_totals;  // per arm, sum_t c_t(a)
  double algorithm_total = 0.0;     // sum_t c_t(a_t) (or realized draws, see regret_mode)
};

inline double resolved_sigma(const ExperimentConfig& cfg, const ArmGrid& grid) {
  return cfg.sigma >= 0.0 ? cfg.sigma : grid.spacing() / 100.0;
}

inline double resolved_width(const ExperimentConfig& cfg, const ArmGrid* grid) {
  if (cfg.reward_width >= 0.0) return cfg.reward_width;
  if (grid != nullptr) return grid->spacing();
  return 0.0;
}

inline std::unique_ptr<Environment> make_environment(const ExperimentConfig& cfg,
                                                     RngStream env_rng) {
  const RewardKind kind = parse_reward_kind(cfg.reward);
  if (cfg.env_kind == "stochastic_gap") {
    return std::make_unique<StationaryEnvironment>(
        stochastic_gap_means(cfg.k, cfg.delta, cfg.best_arm), kind,
        resolved_width(cfg, nullptr), env_rng);
  }
  if (cfg.env_kind == "phased") {
    return std::make_unique<PhasedAdversarialEnvironment>(
        cfg.k, cfg.delta, cfg.best_arm, cfg.base_phase, kind,
        resolved_width(cfg, nullptr), env_rng);
  }
  if (cfg.env_kind == "traveling") {
    ArmGrid grid(cfg.k, cfg.d);
    const double sigma = resolved_sigma(cfg, grid);
    const double width = resolved_width(cfg, &grid);
    return std::make_unique<TravelingEnvironment>(std::move(grid), sigma, kind, width,
                                                  env_rng);
  }
  if (cfg.env_kind == "clustered_gap") {
    return std::make_unique<StationaryEnvironment>(
        clustered_gap_means(cfg.env_clusters, cfg.arms_per_cluster, cfg.gap_between,
                            cfg.gap_within, cfg.mu_star),
        kind, resolved_width(cfg, nullptr), env_rng);
  }
  if (cfg.env_kind == "trace") {
    RewardTrace trace = load_reward_trace(cfg.trace_path);
    const long long span = trace.last_time() - trace.first_time() + 1;
    if (cfg.horizon > span)
      throw ConfigError("run.horizon = " + std::to_string(cfg.horizon) +
                        " exceeds the trace span of " + std::to_string(span) +
                        " steps (no extrapolation)");
    return std::make_unique<TraceEnvironment>(std::move(trace));
  }
  throw ConfigError("unknown env.kind '" + cfg.env_kind + "'");
}

inline Partition make_partition(const ExperimentConfig& cfg, int arms, int clusters,
                                RngStream partition_rng) {
  const std::string& method = cfg.partition_method;
  if (method == "grid") return grid_partition(ArmGrid(arms, cfg.d), clusters);
  if (method == "kmeans")
    return kmeans_partition(ArmGrid(arms, cfg.d).positions(), clusters, partition_rng);
  if (method == "shuffled") return shuffled_partition(arms, clusters, partition_rng);
  if (method == "roundrobin") return round_robin_partition(arms, clusters);
  if (method == "blocks") return block_partition(arms, clusters);
  if (method == "file") return load_partition_csv(cfg.partition_path);
  throw ConfigError("unknown partition.method '" + method + "'");
}

// Builds the configured algorithm for one run. Flat policies draw from the
// ("child", 0) stream, so a flat run is bit-identical to abob with p = 1.
inline std::unique_ptr<Policy> make_algorithm(const ExperimentConfig& cfg, int arms,
                                              int clusters, const RngStream& run_rng) {
  if (cfg.algo_kind == "flat") {
    return make_policy(parse_policy_kind(cfg.flat_policy), arms, cfg.horizon,
                       run_rng.derive("child", 0), cfg.ucb_alpha);
  }
  Partition partition = make_partition(cfg, arms, clusters, run_rng.derive("partition"));
  return make_hierarchical(std::move(partition), parse_policy_kind(cfg.parent_policy),
                           parse_policy_kind(cfg.child_policy), cfg.horizon, run_rng,
                           cfg.ucb_alpha);
}

// Offline weak-regret series against the best fixed arm per prefix:
// r(tau) = max_a sum_{t<=tau} c_t(a) - sum_{t<=tau} c_t(a_t).
inline std::vector<double> cumulative_regret(const std::vector<std::vector<double>>& means,
                                             const std::vector<int>& chosen) {
  if (means.empty()) throw std::invalid_argument("cumulative_regret: no rounds");
  if (means.size() != chosen.size())
    throw std::invalid_argument("cumulative_regret: means/chosen length mismatch");
  const std::size_t arms = means[0].size();
  std::vector<double> totals(arms, 0.0);
  std::vector<double> series(means.size());
  double algorithm_total = 0.0;
  for (std::size_t t = 0; t < means.size(); ++t) {
    if (means[t].size() != arms)
      throw std::invalid_argument("cumulative_regret: ragged mean matrix");
    for (std::size_t a = 0; a < arms; ++a) totals[a] += means[t][a];
    algorithm_total += means[t][chosen[t]];
    double best = totals[0];
    for (std::size_t a = 1; a < arms; ++a) best = std::max(best, totals[a]);
    series[t] = best - algorithm_total;
  }
  return series;
}

// One seeded run. Deterministic given (cfg.seed, repeat_index); all streams
// hang off derive(master, ("run", repeat_index)). With capture=false the
// per-step logs are skipped and only totals/final regret are kept.
inline RunRecord run_once(const ExperimentConfig& cfg, int repeat_index,
                          bool capture = true) {
  const RngStream run_rng =
      RngStream(cfg.seed).derive("run", static_cast<std::uint64_t>(repeat_index));
  auto env = make_environment(cfg, run_rng.derive("env"));
  const int arms = env->arm_count();
  auto policy = make_algorithm(cfg, arms, cfg.p, run_rng);
  auto* hierarchical = dynamic_cast<HierarchicalBandit*>(policy.get());
  const bool regret_on_means = cfg.regret_mode == "mean";

  RunRecord record;
  record.mean_totals.assign(arms, 0.0);
  if (capture) {
    record.steps.reserve(cfg.horizon);
    record.regret.reserve(cfg.horizon);
  }

  for (long long t = 0; t < cfg.horizon; ++t) {
    const auto& means = env->advance(t);
    for (int a = 0; a < arms; ++a) record.mean_totals[a] += means[a];
    const int arm = policy->select();
    const double reward = env->draw(arm);
    policy->update(arm, reward);
    record.algorithm_total += regret_on_means ? means[arm] : reward;

    double best = record.mean_totals[0];
    for (int a = 1; a < arms; ++a) best = std::max(best, record.mean_totals[a]);
    record.final_regret = best - record.algorithm_total;
    if (capture) {
      record.steps.push_back({t + 1, hierarchical ? hierarchical->last_cluster() : -1,
                              arm, reward});
      record.regret.push_back(record.final_regret);
    }
  }
  return record;
}

struct SweepRow {
  int p = 0;
  bool valid = false;
  std::string error;            // set when the p value was skipped
  double mean_regret = 0.0;
  double std_regret = 0.0;
  int repeats = 0;
  std::vector<double> final_regrets;
};

// Final regret per (p, repeat), mean and sample std per p. Rows follow the
// order of p_values; invalid p values are skipped with the error recorded.
// Repeats share seeds across p values (derived from the repeat label only),
// so execution order and worker count never change the numbers.
inline std::vector<SweepRow> sweep_clusters(const ExperimentConfig& cfg,
                                            const std::vector<int>& p_values) {
  std::vector<SweepRow> rows(p_values.size());
  struct Task {
    std::size_t row;
    int repeat;
  };
  std::vector<Task> tasks;
  const int arms = cfg.env_kind == "trace"
                       ? load_reward_trace(cfg.trace_path).arm_count()
                       : cfg.k;
  for (std::size_t i = 0; i < p_values.size(); ++i) {
    rows[i].p = p_values[i];
    try {
      // Structural check before launching repeats; flat configs ignore p.
      if (cfg.algo_kind == "abob")
        make_partition(cfg, arms, p_values[i], RngStream(cfg.seed).derive("probe"));
      rows[i].valid = true;
      rows[i].final_regrets.assign(cfg.repeats, 0.0);
      for (int r = 0; r < cfg.repeats; ++r) tasks.push_back({i, r});
    } catch (const std::exception& e) {
      rows[i].error = e.what();
    }
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const unsigned hw = std::thread::hardware_concurrency();
  const unsigned workers =
      cfg.workers > 0 ? static_cast<unsigned>(cfg.workers) : std::max(1u, hw);
  auto worker = [&] {
    for (;;) {
      const std::size_t index = next.fetch_add(1);
      if (index >= tasks.size()) return;
      const Task task = tasks[index];
      try {
        ExperimentConfig run_cfg = cfg;
        run_cfg.p = rows[task.row].p;
        const RunRecord record = run_once(run_cfg, task.repeat, /*capture=*/false);
        rows[task.row].final_regrets[task.repeat] = record.final_regret;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& row : rows) {
    if (!row.valid) continue;
    row.repeats = cfg.repeats;
    row.mean_regret = mean_of(row.final_regrets);
    row.std_regret = cfg.repeats > 1 ? stddev_of(row.final_regrets) : 0.0;
  }
  return rows;
}

}  // namespace abob
