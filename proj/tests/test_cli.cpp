#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "support/test_util.hpp"

namespace {

std::string cli_path() {
  const char* path = std::getenv("ABOB_CLI");
  REQUIRE(path != nullptr);
  return path;
}

int run_cli(const std::string& args, const std::filesystem::path& log) {
  const std::string command = cli_path() + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSmallRunConfig =
    "env.kind = stochastic_gap\n"
    "env.k = 8\n"
    "env.delta = 0.2\n"
    "env.best_arm = 1\n"
    "algo.kind = abob\n"
    "algo.parent = tsallis\n"
    "algo.child = tsallis\n"
    "partition.method = blocks\n"
    "partition.p = 4\n"
    "run.horizon = 300\n"
    "run.repeats = 2\n"
    "run.seed = 7\n"
    "run.workers = 1\n";

nlohmann::json summary_without_wall_clock(const std::filesystem::path& path) {
  auto j = nlohmann::json::parse(testutil::read_file(path));
  j.erase("wall_clock_seconds");
  return j;
}

}  // namespace

TEST_CASE("validate accepts a good config and rejects a bad one") {
  const auto dir = testutil::make_temp_dir("cli_validate");
  testutil::write_file(dir / "good.cfg", kSmallRunConfig);
  REQUIRE(run_cli("validate --config " + (dir / "good.cfg").string(), dir / "log1") == 0);

  testutil::write_file(dir / "bad.cfg", std::string(kSmallRunConfig) + "env.mystery = 3\n");
  REQUIRE(run_cli("validate --config " + (dir / "bad.cfg").string(), dir / "log2") == 2);
  REQUIRE(testutil::read_file(dir / "log2").find("unknown config key") != std::string::npos);

  testutil::write_file(dir / "bad2.cfg", std::string(kSmallRunConfig) + "partition.p = 3\n");
  REQUIRE(run_cli("validate --config " + (dir / "bad2.cfg").string(), dir / "log3") == 2);

  REQUIRE(run_cli("validate --config " + (dir / "missing.cfg").string(), dir / "log4") == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("run emits trajectory, partition, and summary") {
  const auto dir = testutil::make_temp_dir("cli_run");
  testutil::write_file(dir / "run.cfg", kSmallRunConfig);
  const auto out = dir / "out";
  REQUIRE(run_cli("run --config " + (dir / "run.cfg").string() + " --out " + out.string(),
                  dir / "log") == 0);
  REQUIRE(std::filesystem::exists(out / "trajectory.csv"));
  REQUIRE(std::filesystem::exists(out / "summary.json"));
  REQUIRE(std::filesystem::exists(out / "partition.csv"));

  const auto j = nlohmann::json::parse(testutil::read_file(out / "summary.json"));
  REQUIRE(j["config"]["run.seed"] == 7);
  REQUIRE(j["results"]["final_regrets"].size() == 2);
  REQUIRE(j.contains("wall_clock_seconds"));

  const std::string trajectory = testutil::read_file(out / "trajectory.csv");
  REQUIRE(trajectory.rfind("run_id,t,cluster,arm,reward,cum_regret\n", 0) == 0);
  REQUIRE(trajectory.find("\n1,300,") != std::string::npos);  // final round of run 1
  std::filesystem::remove_all(dir);
}

TEST_CASE("two executions are byte-identical apart from wall clock") {
  const auto dir = testutil::make_temp_dir("cli_determinism");
  testutil::write_file(dir / "run.cfg", kSmallRunConfig);
  const auto out_a = dir / "a";
  const auto out_b = dir / "b";
  REQUIRE(run_cli("run --config " + (dir / "run.cfg").string() + " --out " + out_a.string(),
                  dir / "log_a") == 0);
  REQUIRE(run_cli("run --config " + (dir / "run.cfg").string() + " --out " + out_b.string(),
                  dir / "log_b") == 0);
  REQUIRE(testutil::read_file(out_a / "trajectory.csv") ==
          testutil::read_file(out_b / "trajectory.csv"));
  REQUIRE(testutil::read_file(out_a / "partition.csv") ==
          testutil::read_file(out_b / "partition.csv"));
  REQUIRE(summary_without_wall_clock(out_a / "summary.json") ==
          summary_without_wall_clock(out_b / "summary.json"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep emits one row per cluster count") {
  const auto dir = testutil::make_temp_dir("cli_sweep");
  testutil::write_file(dir / "sweep.cfg",
                       std::string(kSmallRunConfig) + "sweep.p_values = 1,2,4,8\n");
  const auto out = dir / "out";
  REQUIRE(run_cli("sweep --config " + (dir / "sweep.cfg").string() + " --out " +
                      out.string(),
                  dir / "log") == 0);
  const std::string sweep = testutil::read_file(out / "sweep.csv");
  REQUIRE(sweep.rfind("p,mean_regret,std_regret,repeats\n", 0) == 0);
  int lines = 0;
  for (char c : sweep) lines += c == '\n';
  REQUIRE(lines == 5);  // header + 4 rows
  REQUIRE(sweep.find("\n1,") != std::string::npos);
  REQUIRE(sweep.find("\n8,") != std::string::npos);

  const auto j = nlohmann::json::parse(testutil::read_file(out / "summary.json"));
  REQUIRE(j["t_tests"].size() == 3);  // every p compared against the flat row
  std::filesystem::remove_all(dir);
}

TEST_CASE("seed and repeat overrides change the outputs") {
  const auto dir = testutil::make_temp_dir("cli_overrides");
  testutil::write_file(dir / "run.cfg", kSmallRunConfig);
  const auto out_a = dir / "a";
  const auto out_b = dir / "b";
  REQUIRE(run_cli("run --config " + (dir / "run.cfg").string() + " --seed 8 --repeats 3 --out " +
                      out_a.string(),
                  dir / "log_a") == 0);
  REQUIRE(run_cli("run --config " + (dir / "run.cfg").string() + " --out " + out_b.string(),
                  dir / "log_b") == 0);
  const auto a = nlohmann::json::parse(testutil::read_file(out_a / "summary.json"));
  REQUIRE(a["config"]["run.seed"] == 8);
  REQUIRE(a["results"]["final_regrets"].size() == 3);
  REQUIRE(testutil::read_file(out_a / "trajectory.csv") !=
          testutil::read_file(out_b / "trajectory.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("replay drives a trace and requires the trace environment") {
  const auto dir = testutil::make_temp_dir("cli_replay");
  testutil::write_file(dir / "trace.csv", testutil::synthetic_trace_csv(4, 40, 5));
  testutil::write_file(dir / "replay.cfg",
                       "env.kind = trace\n"
                       "env.trace_path = " + (dir / "trace.csv").string() + "\n"
                       "algo.kind = abob\n"
                       "algo.parent = tsallis\n"
                       "algo.child = tsallis\n"
                       "partition.method = blocks\n"
                       "partition.p = 2\n"
                       "run.horizon = 150\n"
                       "run.repeats = 2\n"
                       "run.seed = 3\n"
                       "run.workers = 1\n");
  const auto out = dir / "out";
  REQUIRE(run_cli("replay --config " + (dir / "replay.cfg").string() + " --out " +
                      out.string(),
                  dir / "log") == 0);
  REQUIRE(std::filesystem::exists(out / "trajectory.csv"));

  testutil::write_file(dir / "notrace.cfg", kSmallRunConfig);
  REQUIRE(run_cli("replay --config " + (dir / "notrace.cfg").string(), dir / "log2") == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("lipschitz emits per-arm estimates on the metric surface") {
  const auto dir = testutil::make_temp_dir("cli_lipschitz");
  testutil::write_file(dir / "lip.cfg",
                       "env.kind = traveling\n"
                       "env.k = 64\n"
                       "env.d = 2\n"
                       "env.sigma = 0\n"
                       "algo.kind = flat\n"
                       "run.horizon = 100\n"
                       "run.seed = 2\n"
                       "lipschitz.neighbors = 4\n"
                       "lipschitz.shuffles = 3\n");
  const auto out = dir / "out";
  REQUIRE(run_cli("lipschitz --config " + (dir / "lip.cfg").string() + " --out " +
                      out.string(),
                  dir / "log") == 0);
  const std::string csv = testutil::read_file(out / "lipschitz.csv");
  REQUIRE(csv.rfind("arm,ell\n", 0) == 0);
  int lines = 0;
  for (char c : csv) lines += c == '\n';
  REQUIRE(lines == 65);  // header + one row per arm

  const auto j = nlohmann::json::parse(testutil::read_file(out / "summary.json"));
  REQUIRE(j["results"]["median_ell"].get<double>() <= 1.05);
  REQUIRE(j["results"]["shuffled_median_ells"].size() == 3);
  std::filesystem::remove_all(dir);
}

TEST_CASE("unwritable output directory fails up front with a runtime error") {
  const auto dir = testutil::make_temp_dir("cli_unwritable");
  testutil::write_file(dir / "run.cfg", kSmallRunConfig);
  REQUIRE(run_cli("run --config " + (dir / "run.cfg").string() +
                      " --out /proc/definitely_not_writable/x",
                  dir / "log") == 3);
  std::filesystem::remove_all(dir);
}
