#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "abob/policy.hpp"
#include "abob/rng.hpp"

namespace abob {

// UCB1 index policy: argmax_i mean_i + alpha * sqrt(ln t / n_i), with forced
// exploration of unvisited arms (lowest index first) and ties broken by
// lowest index. Selection is a pure function of state; no randomness is
// consumed. probabilities() exposes a one-hot vector over the argmax so the
// logging schema is uniform across policies.
class Ucb1 final : public Policy {
 public:
  static constexpr double kDefaultAlpha = 1.4142135623730951;  // sqrt(2)

  explicit Ucb1(int arms, double alpha = kDefaultAlpha)
      : k_(arms), alpha_(alpha), counts_(arms, 0), means_(arms, 0.0), probs_(arms, 0.0) {
    if (arms < 1) throw std::invalid_argument("Ucb1: arms must be >= 1");
    if (!(alpha >= 0.0)) throw std::invalid_argument("Ucb1: alpha must be >= 0");
  }

  int arm_count() const override { return k_; }
  long long total_pulls() const { return total_pulls_; }
  const std::vector<long long>& counts() const { return counts_; }
  const std::vector<double>& mean_estimates() const { return means_; }

  const std::vector<double>& probabilities() override {
    std::fill(probs_.begin(), probs_.end(), 0.0);
    probs_[select()] = 1.0;
    return probs_;
  }

  int select() override {
    for (int i = 0; i < k_; ++i)
      if (counts_[i] == 0) return i;
    const double log_t = std::log(static_cast<double>(total_pulls_));
    int best = 0;
    double best_index = -1.0;
    for (int i = 0; i < k_; ++i) {
      const double index =
          means_[i] + alpha_ * std::sqrt(log_t / static_cast<double>(counts_[i]));
      if (index > best_index) {
        best_index = index;
        best = i;
      }
    }
    return best;
  }

  void update(int arm, double reward) override {
    if (arm < 0 || arm >= k_) throw std::out_of_range("Ucb1::update: arm out of range");
    ++counts_[arm];
    ++total_pulls_;
    means_[arm] += (reward - means_[arm]) / static_cast<double>(counts_[arm]);
  }

 private:
  int k_;
  double alpha_;
  std::vector<long long> counts_;
  std::vector<double> means_;
  std::vector<double> probs_;
  long long total_pulls_ = 0;
};

}  // namespace abob
