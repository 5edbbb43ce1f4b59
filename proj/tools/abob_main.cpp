#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "abob/config.hpp"
#include "abob/outputs.hpp"
#include "abob/partitioning.hpp"
#include "abob/runner.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

struct CliOverrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> repeats;
  std::optional<int> workers;
  std::optional<std::string> out_dir;
};

void add_common_options(CLI::App* cmd, CliOverrides& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config file")->required();
  cmd->add_option("--seed", opts.seed, "master seed (overrides run.seed)");
  cmd->add_option("--repeats", opts.repeats, "repeat count (overrides run.repeats)");
  cmd->add_option("--workers", opts.workers, "worker threads (overrides run.workers)");
  cmd->add_option("--out", opts.out_dir, "output directory (overrides out.dir)");
}

abob::ExperimentConfig load_and_validate(const CliOverrides& opts,
                                         std::vector<std::string>& warnings) {
  abob::ExperimentConfig cfg = abob::load_config_file(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.repeats) cfg.repeats = *opts.repeats;
  if (opts.workers) cfg.workers = *opts.workers;
  if (opts.out_dir) cfg.out_dir = *opts.out_dir;

  int trace_arms = 0;
  if (cfg.env_kind == "trace") {
    if (cfg.trace_path.empty()) throw abob::ConfigError("env.kind = trace requires env.trace_path");
    try {
      const auto trace = abob::load_reward_trace(cfg.trace_path);
      trace_arms = trace.arm_count();
      const long long span = trace.last_time() - trace.first_time() + 1;
      if (cfg.horizon > span)
        throw abob::ConfigError("run.horizon exceeds trace span of " + std::to_string(span));
    } catch (const abob::ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw abob::ConfigError(std::string("trace validation failed: ") + e.what());
    }
    cfg.k = trace_arms;
  }
  warnings = abob::validate_config(cfg, trace_arms);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  return cfg;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int command_run(const CliOverrides& opts, bool replay) {
  std::vector<std::string> warnings;
  abob::ExperimentConfig cfg = load_and_validate(opts, warnings);
  if (replay && cfg.env_kind != "trace")
    throw abob::ConfigError("replay requires env.kind = trace");

  // Open every output before any computation starts.
  auto trajectory = abob::open_output_file(cfg.out_dir, "trajectory.csv");
  auto summary = abob::open_output_file(cfg.out_dir, "summary.json");
  std::optional<std::ofstream> partition_out;
  if (cfg.algo_kind == "abob")
    partition_out = abob::open_output_file(cfg.out_dir, "partition.csv");

  const auto start = std::chrono::steady_clock::now();
  abob::write_trajectory_header(trajectory);
  std::vector<double> finals;
  finals.reserve(cfg.repeats);
  for (int r = 0; r < cfg.repeats; ++r) {
    const abob::RunRecord record = abob::run_once(cfg, r, /*capture=*/true);
    abob::write_trajectory_rows(trajectory, r, record);
    finals.push_back(record.final_regret);
    std::cerr << "run " << (r + 1) << "/" << cfg.repeats
              << ": final regret " << abob::format_value(record.final_regret) << "\n";
  }
  if (partition_out) {
    // Repeat 0's partition; k-means and shuffled layouts are reproducible
    // from it via partition.method = file.
    const abob::RngStream run_rng = abob::RngStream(cfg.seed).derive("run", 0);
    abob::save_partition_csv(
        abob::make_partition(cfg, cfg.k, cfg.p, run_rng.derive("partition")),
        *partition_out);
  }

  nlohmann::json j = abob::build_summary_json(cfg, warnings, {}, elapsed_seconds(start));
  j["results"]["final_regrets"] = finals;
  j["results"]["mean_regret"] = abob::mean_of(finals);
  j["results"]["std_regret"] = finals.size() > 1 ? abob::stddev_of(finals) : 0.0;
  summary << j.dump(2) << "\n";

  std::cout << "mean final regret " << abob::format_value(abob::mean_of(finals));
  if (finals.size() > 1)
    std::cout << " +- " << abob::format_value(abob::stddev_of(finals));
  std::cout << " over " << cfg.repeats << " repeats\n";
  return 0;
}

int command_sweep(const CliOverrides& opts) {
  std::vector<std::string> warnings;
  abob::ExperimentConfig cfg = load_and_validate(opts, warnings);
  if (cfg.algo_kind != "abob")
    throw abob::ConfigError("sweep requires algo.kind = abob (flat ignores the cluster count)");
  const std::vector<int> p_values =
      cfg.sweep_p.empty() ? abob::default_sweep_values(cfg.k) : cfg.sweep_p;

  auto sweep_file = abob::open_output_file(cfg.out_dir, "sweep.csv");
  auto summary = abob::open_output_file(cfg.out_dir, "summary.json");

  const auto start = std::chrono::steady_clock::now();
  const auto rows = abob::sweep_clusters(cfg, p_values);
  for (const auto& row : rows)
    if (!row.valid)
      std::cerr << "warning: skipped p=" << row.p << ": " << row.error << "\n";
  abob::write_sweep_csv(sweep_file, rows);

  // Welch tests of every row against the flat row (p = 1) when present.
  std::vector<abob::Comparison> comparisons;
  const abob::SweepRow* flat = nullptr;
  for (const auto& row : rows)
    if (row.valid && row.p == 1) { flat = &row; break; }
  if (flat && flat->repeats >= 2) {
    for (const auto& row : rows) {
      if (!row.valid || &row == flat) continue;
      try {
        const auto test = abob::welch_t_test(row.final_regrets, flat->final_regrets);
        comparisons.push_back({"p=" + std::to_string(row.p) + " vs p=1", test.t, test.p_value});
      } catch (const std::invalid_argument&) {
        // Degenerate samples (zero pooled variance); no test to report.
      }
    }
  }

  nlohmann::json j = abob::build_summary_json(cfg, warnings, comparisons, elapsed_seconds(start));
  j["results"]["rows"] = nlohmann::json::array();
  for (const auto& row : rows) {
    if (!row.valid) continue;
    j["results"]["rows"].push_back({{"p", row.p},
                                    {"mean_regret", row.mean_regret},
                                    {"std_regret", row.std_regret},
                                    {"repeats", row.repeats},
                                    {"final_regrets", row.final_regrets}});
  }
  summary << j.dump(2) << "\n";

  for (const auto& row : rows)
    if (row.valid)
      std::cout << "p=" << row.p << " mean " << abob::format_value(row.mean_regret)
                << " +- " << abob::format_value(row.std_regret) << "\n";
  return 0;
}

int command_lipschitz(const CliOverrides& opts) {
  std::vector<std::string> warnings;
  abob::ExperimentConfig cfg = load_and_validate(opts, warnings);
  if (cfg.env_kind != "traveling" && cfg.env_kind != "trace")
    throw abob::ConfigError("lipschitz needs env.kind = traveling (grid surface) or trace");

  auto out = abob::open_output_file(cfg.out_dir, "lipschitz.csv");
  auto summary = abob::open_output_file(cfg.out_dir, "summary.json");
  const auto start = std::chrono::steady_clock::now();

  abob::ArmFeatures features;
  std::vector<double> mean_rewards;
  const abob::RngStream master(cfg.seed);
  if (cfg.env_kind == "traveling") {
    auto env = abob::make_environment(cfg, master.derive("env"));
    features = abob::ArmGrid(cfg.k, cfg.d).positions();
    mean_rewards.assign(cfg.k, 0.0);
    const long long rounds = std::min<long long>(cfg.horizon, 10000);
    for (long long t = 0; t < rounds; ++t) {
      const auto& means = env->advance(t);
      for (int a = 0; a < cfg.k; ++a) mean_rewards[a] += means[a];
    }
    for (auto& m : mean_rewards) m /= static_cast<double>(rounds);
  } else {
    const auto trace = abob::load_reward_trace(cfg.trace_path);
    const int arms = trace.arm_count();
    // No recorded arm coordinates in a trace: fall back to the normalized
    // arm index as a 1-D feature.
    features.resize(arms);
    for (int a = 0; a < arms; ++a)
      features[a] = {arms > 1 ? static_cast<double>(a) / (arms - 1) : 0.0};
    mean_rewards.assign(arms, 0.0);
    long long rounds = 0;
    for (long long t = trace.first_time(); t <= trace.last_time(); ++t, ++rounds)
      for (int a = 0; a < arms; ++a) mean_rewards[a] += abob::trace_mean(trace, t, a);
    for (auto& m : mean_rewards) m /= static_cast<double>(rounds);
  }

  const auto ell = abob::lipschitz_estimate(features, mean_rewards, cfg.neighbors);
  abob::write_lipschitz_csv(out, ell);

  auto median_of = [](std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
  };
  const double real_median = median_of(ell);
  std::vector<double> shuffled_medians;
  abob::RngStream shuffle_rng = master.derive("shuffle");
  for (int s = 0; s < cfg.shuffles; ++s) {
    std::vector<double> permuted = mean_rewards;
    for (std::size_t i = permuted.size() - 1; i > 0; --i) {
      const auto j = shuffle_rng.next_below(i + 1);
      std::swap(permuted[i], permuted[j]);
    }
    shuffled_medians.push_back(
        median_of(abob::lipschitz_estimate(features, permuted, cfg.neighbors)));
  }

  nlohmann::json j = abob::build_summary_json(cfg, warnings, {}, elapsed_seconds(start));
  j["results"]["median_ell"] = real_median;
  j["results"]["shuffled_median_ells"] = shuffled_medians;
  summary << j.dump(2) << "\n";
  std::cout << "median ell " << abob::format_value(real_median) << "; shuffled medians ";
  for (double m : shuffled_medians) std::cout << abob::format_value(m) << " ";
  std::cout << "\n";
  return 0;
}

int command_validate(const CliOverrides& opts) {
  std::vector<std::string> warnings;
  const abob::ExperimentConfig cfg = load_and_validate(opts, warnings);
  std::cout << abob::config_to_json(cfg).dump(2) << "\n";
  std::cout << "config ok (" << warnings.size() << " warning(s))\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical bandit-over-bandits experiment runner"};
  app.require_subcommand(1);

  CliOverrides run_opts, sweep_opts, replay_opts, lipschitz_opts, validate_opts;
  auto* run_cmd = app.add_subcommand("run", "single experiment, emits trajectory + summary");
  add_common_options(run_cmd, run_opts);
  auto* sweep_cmd = app.add_subcommand("sweep", "cluster-count sweep, emits sweep + summary");
  add_common_options(sweep_cmd, sweep_opts);
  auto* replay_cmd = app.add_subcommand("replay", "trace-driven run");
  add_common_options(replay_cmd, replay_opts);
  auto* lipschitz_cmd =
      app.add_subcommand("lipschitz", "empirical Lipschitz estimate, emits lipschitz.csv");
  add_common_options(lipschitz_cmd, lipschitz_opts);
  auto* validate_cmd = app.add_subcommand("validate", "config check only");
  add_common_options(validate_cmd, validate_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (run_cmd->parsed()) return command_run(run_opts, /*replay=*/false);
    if (sweep_cmd->parsed()) return command_sweep(sweep_opts);
    if (replay_cmd->parsed()) return command_run(replay_opts, /*replay=*/true);
    if (lipschitz_cmd->parsed()) return command_lipschitz(lipschitz_opts);
    if (validate_cmd->parsed()) return command_validate(validate_opts);
  } catch (const abob::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return 0;
}
