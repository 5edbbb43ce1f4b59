#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "abob/tsallis.hpp"
#include "support/test_util.hpp"

using abob::RngStream;
using abob::TsallisInf;
using abob::tsallis_probabilities;

TEST_CASE("fresh state is uniform") {
  TsallisInf two(2, RngStream(1));
  for (double p : two.probabilities()) REQUIRE(p == Catch::Approx(0.5).margin(1e-12));

  const auto equal = tsallis_probabilities(std::vector<double>{7.0, 7.0, 7.0, 7.0}, 31);
  for (double p : equal.probs) REQUIRE(p == Catch::Approx(0.25).margin(1e-12));
}

TEST_CASE("large loss gap concentrates mass, matching the bisection oracle") {
  const std::vector<double> losses = {0.0, 100.0};
  const auto solution = tsallis_probabilities(losses, 100);
  const auto oracle = testutil::tsallis_bisection_oracle(losses, 100);
  REQUIRE(solution.probs[0] == Catch::Approx(oracle[0]).margin(1e-9));
  REQUIRE(solution.probs[1] == Catch::Approx(oracle[1]).margin(1e-9));
  // Frozen oracle value for eta = 1/sqrt(100).
  REQUIRE(solution.probs[0] == Catch::Approx(0.9723524769105132).margin(1e-9));
  REQUIRE(solution.probs[0] > 0.97);
}

TEST_CASE("solution satisfies the stationarity equation to 1e-9") {
  RngStream rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + static_cast<int>(rng.next_below(30));
    std::vector<double> losses(k);
    for (double& l : losses) l = rng.next_uniform() * 500.0;
    const long long round = 1 + static_cast<long long>(rng.next_below(100000));
    const auto solution = tsallis_probabilities(losses, round);
    const double eta = 1.0 / std::sqrt(static_cast<double>(round));
    double residual = 0.0;
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      const double h = eta * (losses[i] - solution.normalizer);
      residual += 4.0 / (h * h);
      REQUIRE(solution.probs[i] > 0.0);
      sum += solution.probs[i];
    }
    REQUIRE(std::abs(residual - 1.0) <= 1e-9);
    REQUIRE(std::abs(sum - 1.0) <= 1e-9);
    REQUIRE(solution.normalizer < *std::min_element(losses.begin(), losses.end()));
  }
}

TEST_CASE("probabilities are invariant under a constant loss shift") {
  RngStream rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(rng.next_below(10));
    std::vector<double> losses(k);
    for (double& l : losses) l = rng.next_uniform() * 50.0;
    std::vector<double> shifted = losses;
    const double shift = 1000.0 * (rng.next_uniform() - 0.5);
    for (double& l : shifted) l += shift;
    const auto base = tsallis_probabilities(losses, 17);
    const auto moved = tsallis_probabilities(shifted, 17);
    for (int i = 0; i < k; ++i)
      REQUIRE(base.probs[i] == Catch::Approx(moved.probs[i]).margin(1e-9));
  }
}

TEST_CASE("update accumulates importance-weighted loss and advances the round") {
  TsallisInf policy(3, RngStream(1));
  REQUIRE(policy.round() == 1);

  policy.update(0, 1.0, 0.5);  // full reward = zero loss
  REQUIRE(policy.cumulative_losses()[0] == 0.0);
  REQUIRE(policy.round() == 2);

  policy.update(1, 0.0, 0.25);  // zero reward at probability 1/4
  REQUIRE(policy.cumulative_losses()[1] == Catch::Approx(4.0).margin(1e-15));
  REQUIRE(policy.round() == 3);

  REQUIRE_THROWS_AS(policy.update(0, 0.5, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(policy.update(7, 0.5, 0.5), std::out_of_range);
}

TEST_CASE("symmetric alternating rewards keep two arms balanced") {
  TsallisInf policy(2, RngStream(1));
  for (int round = 0; round < 50; ++round) {
    const double reward = (round % 3 == 0) ? 0.0 : 0.7;
    const auto first = policy.probabilities();
    policy.update(0, reward, first[0]);
    const auto second = policy.probabilities();
    policy.update(1, reward, second[1]);
    const auto& probs = policy.probabilities();
    REQUIRE(probs[0] == Catch::Approx(0.5).margin(1e-9));
    REQUIRE(probs[1] == Catch::Approx(0.5).margin(1e-9));
  }
}

TEST_CASE("solver handles extreme states without failing") {
  std::vector<double> losses(256, 0.0);
  for (int i = 0; i < 256; ++i) losses[i] = i * 1000.0;
  REQUIRE_NOTHROW(tsallis_probabilities(losses, 1));
  REQUIRE_NOTHROW(tsallis_probabilities(losses, 1000000000));
  REQUIRE_THROWS_AS(tsallis_probabilities(std::vector<double>{}, 5), std::invalid_argument);
  REQUIRE_THROWS_AS(tsallis_probabilities(std::vector<double>{1.0}, 0), std::invalid_argument);
}
