#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <vector>

#include "abob/environments.hpp"
#include "abob/grid.hpp"
#include "abob/trace.hpp"
#include "support/test_util.hpp"

using abob::ArmGrid;
using abob::RngStream;

TEST_CASE("16x16 grid fills the 2D cube with unit diameter") {
  ArmGrid grid(256, 2);
  REQUIRE(grid.side() == 16);
  REQUIRE(grid.spacing() == Catch::Approx((1.0 / std::sqrt(2.0)) / 15.0).epsilon(1e-14));
  const auto& first = grid.position(0);
  const auto& last = grid.position(255);
  REQUIRE(first[0] == 0.0);
  REQUIRE(first[1] == 0.0);
  REQUIRE(last[0] == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  REQUIRE(last[1] == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  REQUIRE(abob::euclidean_distance(first, last) == Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE_THROWS_AS(ArmGrid(200, 2), std::invalid_argument);
  REQUIRE_THROWS_AS(ArmGrid(256, 4), std::invalid_argument);
}

TEST_CASE("stochastic gap means") {
  const auto means = abob::stochastic_gap_means(256, 0.1, 0);
  REQUIRE(means[0] == Catch::Approx(0.55).margin(1e-15));
  REQUIRE(means[100] == Catch::Approx(0.45).margin(1e-15));

  for (double m : abob::stochastic_gap_means(4, 0.0, 2)) REQUIRE(m == 0.5);

  const auto extreme = abob::stochastic_gap_means(4, 1.0, 1);
  REQUIRE(extreme[1] == 1.0);
  REQUIRE(extreme[0] == 0.0);

  REQUIRE_THROWS_AS(abob::stochastic_gap_means(4, 1.5, 0), std::out_of_range);
  REQUIRE_THROWS_AS(abob::stochastic_gap_means(4, 0.1, 9), std::out_of_range);
}

TEST_CASE("phased adversary switches regimes on the doubling schedule") {
  auto means = abob::phased_adversarial_means(2, 0, 0.1, 0, 50);
  REQUIRE(means[0] == Catch::Approx(0.1).margin(1e-15));
  REQUIRE(means[1] == 0.0);

  means = abob::phased_adversarial_means(2, 50, 0.1, 0, 50);
  REQUIRE(means[0] == 1.0);
  REQUIRE(means[1] == Catch::Approx(0.9).margin(1e-15));

  // Phase boundaries: [0,50), [50,150), [150,350), ...
  REQUIRE(abob::phase_of_step(49, 50) == 0);
  REQUIRE(abob::phase_of_step(50, 50) == 1);
  REQUIRE(abob::phase_of_step(149, 50) == 1);
  REQUIRE(abob::phase_of_step(150, 50) == 2);
  REQUIRE(abob::phase_of_step(349, 50) == 2);
  REQUIRE(abob::phase_of_step(350, 50) == 3);

  for (long long t : {0ll, 7ll, 100ll, 5000ll, 987654ll}) {
    const auto m = abob::phased_adversarial_means(3, t, 0.1, 1, 50);
    REQUIRE(m[1] - m[0] == Catch::Approx(0.1).margin(1e-12));
    REQUIRE(m[0] == m[2]);
  }
}

TEST_CASE("traveling mean is the cone around the optimum") {
  const double half = 1.0 / std::sqrt(2.0);
  REQUIRE(abob::traveling_mean({0.3, 0.4}, {0.3, 0.4}, half) == 1.0);
  REQUIRE(abob::traveling_mean({0.0}, {1.0}, 1.0) == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(abob::traveling_mean({0.0, 0.0}, {half, half}, half) ==
          Catch::Approx(0.0).margin(1e-12));
  REQUIRE_THROWS_AS(abob::traveling_mean({1.2}, {0.5}, 1.0), std::domain_error);
}

TEST_CASE("zero-sigma walk never moves and sits at the center") {
  abob::TravelingEnvironment env(ArmGrid(16, 1), 0.0, abob::RewardKind::kMean, 0.0,
                                 RngStream(1));
  const auto start = env.optimum();
  REQUIRE(start[0] == Catch::Approx(0.5).margin(1e-15));
  for (long long t = 0; t < 100; ++t) env.advance(t);
  REQUIRE(env.optimum() == start);
}

TEST_CASE("clipping clamps coordinates into the cube") {
  ArmGrid grid(16, 1);
  std::vector<double> point = {1.09};
  grid.clip(point);
  REQUIRE(point[0] == 1.0);
  point = {-0.2};
  grid.clip(point);
  REQUIRE(point[0] == 0.0);
}

TEST_CASE("walk increments match the seeded normal draws and the moment oracle") {
  // Seed chosen so the optimum never touches the boundary over 10^4 steps.
  const double sigma = 0.01;
  abob::TravelingEnvironment env(ArmGrid(16, 1), sigma, abob::RewardKind::kMean, 0.0,
                                 RngStream(2024).derive("env"));
  RngStream twin = RngStream(2024).derive("env");
  const int steps = 10000;
  double previous = env.optimum()[0];
  env.advance(0);
  double sum = 0.0, sq = 0.0;
  for (int t = 1; t <= steps; ++t) {
    env.advance(t);
    const double current = env.optimum()[0];
    REQUIRE(current > 0.0);
    REQUIRE(current < 1.0);  // no clipping active for this seed
    const double increment = current - previous;
    REQUIRE(increment == Catch::Approx(sigma * twin.next_normal()).margin(1e-15));
    sum += increment;
    sq += increment * increment;
    previous = current;
  }
  const double mean = sum / steps;
  const double variance = sq / steps - mean * mean;
  REQUIRE(std::abs(mean) < 4.0 * sigma / 100.0);
  REQUIRE(variance == Catch::Approx(sigma * sigma).epsilon(0.10));
}

TEST_CASE("clustered gap construction") {
  const auto means = abob::clustered_gap_means(2, 2, 0.3, 0.1, 0.9);
  REQUIRE(means == std::vector<double>{0.8, 0.9, 0.5, 0.6});

  const auto flat = abob::clustered_gap_means(3, 4, 0.2, 0.0, 0.9);
  for (int j = 0; j < 4; ++j) {
    REQUIRE(flat[j] == Catch::Approx(0.9).margin(1e-15));
    REQUIRE(flat[4 + j] == Catch::Approx(0.7).margin(1e-15));
  }

  // Best-of-cluster gap is exactly L for every suboptimal cluster.
  const auto big = abob::clustered_gap_means(5, 7, 0.25, 0.05, 0.95);
  const double best = *std::max_element(big.begin(), big.begin() + 7);
  for (int c = 1; c < 5; ++c) {
    const double cluster_best = *std::max_element(big.begin() + c * 7, big.begin() + (c + 1) * 7);
    REQUIRE(best - cluster_best == Catch::Approx(0.25).margin(1e-12));
  }

  REQUIRE_THROWS_AS(abob::clustered_gap_means(2, 2, 0.8, 0.3, 0.9), std::out_of_range);
}

TEST_CASE("reward draws respect kind semantics") {
  RngStream rng(6);
  for (int i = 0; i < 50; ++i)
    REQUIRE(abob::draw_reward(1.0, abob::RewardKind::kBernoulli, 0.0, rng) == 1.0);
  for (int i = 0; i < 50; ++i)
    REQUIRE(abob::draw_reward(0.0, abob::RewardKind::kBernoulli, 0.0, rng) == 0.0);
  for (int i = 0; i < 50; ++i)
    REQUIRE(abob::draw_reward(0.37, abob::RewardKind::kUniformWidth, 0.0, rng) == 0.37);

  double total = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i)
    total += abob::draw_reward(0.45, abob::RewardKind::kBernoulli, 0.0, rng);
  REQUIRE(std::abs(total / draws - 0.45) < 0.01);

  REQUIRE_THROWS_AS(abob::draw_reward(0.95, abob::RewardKind::kUniformWidth, 0.2, rng),
                    std::out_of_range);
  REQUIRE_THROWS_AS(abob::draw_reward(1.2, abob::RewardKind::kBernoulli, 0.0, rng),
                    std::out_of_range);
}

TEST_CASE("uniform-width draws stay inside the support") {
  RngStream rng(8);
  for (int i = 0; i < 10000; ++i) {
    const double r = abob::draw_reward(0.5, abob::RewardKind::kUniformWidth, 0.2, rng);
    REQUIRE(r >= 0.4);
    REQUIRE(r <= 0.6);
  }
}

TEST_CASE("every environment emits rewards in [0,1]") {
  RngStream seeds(41);
  for (int trial = 0; trial < 3; ++trial) {
    const std::uint64_t seed = seeds.next_u64();
    std::vector<std::unique_ptr<abob::Environment>> envs;
    envs.push_back(std::make_unique<abob::StationaryEnvironment>(
        abob::stochastic_gap_means(8, 0.1, 3), abob::RewardKind::kBernoulli, 0.0,
        RngStream(seed)));
    envs.push_back(std::make_unique<abob::PhasedAdversarialEnvironment>(
        8, 0.1, 0, 10, abob::RewardKind::kBernoulli, 0.0, RngStream(seed)));
    envs.push_back(std::make_unique<abob::TravelingEnvironment>(
        ArmGrid(16, 2), 0.05, abob::RewardKind::kBernoulli, 0.0, RngStream(seed)));
    envs.push_back(std::make_unique<abob::StationaryEnvironment>(
        abob::clustered_gap_means(4, 2, 0.2, 0.05, 0.9), abob::RewardKind::kUniformWidth,
        0.1, RngStream(seed)));
    RngStream arm_picker(seed ^ 1);
    for (auto& env : envs) {
      for (long long t = 0; t < 500; ++t) {
        const auto& means = env->advance(t);
        for (double m : means) {
          REQUIRE(m >= 0.0);
          REQUIRE(m <= 1.0);
        }
        const double r = env->draw(static_cast<int>(arm_picker.next_below(env->arm_count())));
        REQUIRE(r >= 0.0);
        REQUIRE(r <= 1.0);
      }
    }
  }
}

TEST_CASE("traveling surface is 1-Lipschitz on the grid at every round") {
  ArmGrid grid(16, 2);
  abob::TravelingEnvironment env(grid, 0.05, abob::RewardKind::kMean, 0.0, RngStream(3));
  for (long long t = 0; t < 50; ++t) {
    const auto& means = env.advance(t);
    for (int i = 0; i < 16; ++i)
      for (int j = i + 1; j < 16; ++j)
        REQUIRE(std::abs(means[i] - means[j]) <=
                abob::euclidean_distance(grid.position(i), grid.position(j)) + 1e-12);
  }
}

TEST_CASE("environments enforce the advance-then-draw round protocol") {
  abob::StationaryEnvironment env(abob::stochastic_gap_means(4, 0.1, 0),
                                  abob::RewardKind::kMean, 0.0, RngStream(1));
  env.advance(0);
  REQUIRE_THROWS_AS(env.advance(2), std::logic_error);
}

TEST_CASE("trace interpolation hits samples exactly and midpoints linearly") {
  abob::RewardTrace trace;
  trace.times = {0, 10};
  trace.rewards = {{0.2}, {0.6}};
  REQUIRE(abob::trace_mean(trace, 0, 0) == 0.2);
  REQUIRE(abob::trace_mean(trace, 10, 0) == 0.6);
  REQUIRE(abob::trace_mean(trace, 5, 0) == Catch::Approx(0.4).margin(1e-15));
  REQUIRE_THROWS_AS(abob::trace_mean(trace, -1, 0), std::out_of_range);
  REQUIRE_THROWS_AS(abob::trace_mean(trace, 11, 0), std::out_of_range);
}

TEST_CASE("trace loader reports malformed input with line numbers") {
  const auto dir = testutil::make_temp_dir("trace");

  testutil::write_file(dir / "good.csv", "t,arm_0,arm_1\n0,0.1,0.2\n5,0.3,0.4\n10,0.5,0.6\n");
  const auto trace = abob::load_reward_trace((dir / "good.csv").string());
  REQUIRE(trace.arm_count() == 2);
  REQUIRE(trace.times == std::vector<long long>{0, 5, 10});
  REQUIRE(abob::trace_mean(trace, 1, 0) == Catch::Approx(0.14).margin(1e-12));

  testutil::write_file(dir / "header.csv", "time,arm_0\n0,0.5\n");
  REQUIRE_THROWS_WITH(abob::load_reward_trace((dir / "header.csv").string()),
                      Catch::Matchers::ContainsSubstring(":1:"));

  testutil::write_file(dir / "order.csv", "t,arm_0\n5,0.5\n5,0.6\n");
  REQUIRE_THROWS_WITH(abob::load_reward_trace((dir / "order.csv").string()),
                      Catch::Matchers::ContainsSubstring(":3:"));

  testutil::write_file(dir / "range.csv", "t,arm_0\n0,0.5\n1,1.5\n");
  REQUIRE_THROWS_WITH(abob::load_reward_trace((dir / "range.csv").string()),
                      Catch::Matchers::ContainsSubstring(":3:"));

  testutil::write_file(dir / "columns.csv", "t,arm_0,arm_1\n0,0.5,0.5\n1,0.5\n");
  REQUIRE_THROWS_WITH(abob::load_reward_trace((dir / "columns.csv").string()),
                      Catch::Matchers::ContainsSubstring(":3:"));

  testutil::write_file(dir / "short.csv", "t,arm_0\n0,0.5\n");
  REQUIRE_THROWS_WITH(abob::load_reward_trace((dir / "short.csv").string()),
                      Catch::Matchers::ContainsSubstring("at least 2"));

  std::filesystem::remove_all(dir);
}

TEST_CASE("trace environment replays interpolated values as rewards") {
  const auto dir = testutil::make_temp_dir("trace_env");
  testutil::write_file(dir / "trace.csv", testutil::synthetic_trace_csv(4, 20, 5));
  abob::TraceEnvironment env(abob::load_reward_trace((dir / "trace.csv").string()));
  REQUIRE(env.arm_count() == 4);
  for (long long t = 0; t < 60; ++t) {
    const auto& means = env.advance(t);
    for (int a = 0; a < 4; ++a) REQUIRE(env.draw(a) == means[a]);
  }
  std::filesystem::remove_all(dir);
}
