#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "abob/policy.hpp"
#include "abob/rng.hpp"

namespace abob {

// Literature exploration rate: min(1, sqrt(k ln k / ((e-1) T))).
// Zero when k == 1 (ln 1 = 0).
inline double exp3_gamma(int arms, long long horizon) {
  if (arms < 1 || horizon < 1)
    throw std::invalid_argument("exp3_gamma: arms and horizon must be >= 1");
  const double k = static_cast<double>(arms);
  const double raw = std::sqrt(k * std::log(k) /
                               ((std::numbers::e - 1.0) * static_cast<double>(horizon)));
  return std::min(1.0, raw);
}

// EXP3 with importance-weighted exponential updates.
//
//   p_i = (1 - gamma) * w_i / sum(w) + gamma / k
//   w_a <- w_a * exp(gamma * (r / p_a) / k)
//
// Weights are kept in log-domain and the mixture is computed with
// max-subtraction, so arbitrarily long runs of large updates stay finite.
class Exp3 final : public Policy {
 public:
  Exp3(int arms, double gamma, RngStream rng)
      : k_(arms), gamma_(gamma), rng_(rng), log_weights_(arms, 0.0), probs_(arms) {
    if (arms < 1) throw std::invalid_argument("Exp3: arms must be >= 1");
    if (!(gamma >= 0.0 && gamma <= 1.0))
      throw std::invalid_argument("Exp3: gamma must be in [0,1]");
  }

  // Warm start from existing log-domain weights.
  Exp3(int arms, double gamma, RngStream rng, std::vector<double> initial_log_weights)
      : Exp3(arms, gamma, rng) {
    if (static_cast<int>(initial_log_weights.size()) != arms)
      throw std::invalid_argument("Exp3: initial weight vector size mismatch");
    for (double lw : initial_log_weights)
      if (!std::isfinite(lw)) throw std::invalid_argument("Exp3: non-finite log weight");
    log_weights_ = std::move(initial_log_weights);
  }

  int arm_count() const override { return k_; }
  double gamma() const { return gamma_; }
  const std::vector<double>& log_weights() const { return log_weights_; }

  const std::vector<double>& probabilities() override {
    const double max_lw = *std::max_element(log_weights_.begin(), log_weights_.end());
    double sum = 0.0;
    for (int i = 0; i < k_; ++i) {
      probs_[i] = std::exp(log_weights_[i] - max_lw);
      sum += probs_[i];
    }
    const double uniform = gamma_ / static_cast<double>(k_);
    for (int i = 0; i < k_; ++i)
      probs_[i] = (1.0 - gamma_) * (probs_[i] / sum) + uniform;
    return probs_;
  }

  int select() override {
    if (k_ == 1) {
      last_prob_ = 1.0;
      return 0;
    }
    const auto& p = probabilities();
    const int arm = sample_categorical(p, rng_);
    last_prob_ = p[arm];
    return arm;
  }

  void update(int arm, double reward) override { update(arm, reward, last_prob_); }

  // Explicit-probability form: p_arm must be the selection-time probability.
  void update(int arm, double reward, double p_arm) {
    if (arm < 0 || arm >= k_) throw std::out_of_range("Exp3::update: arm out of range");
    if (!(p_arm > 0.0)) throw std::invalid_argument("Exp3::update: p_arm must be > 0");
    log_weights_[arm] += gamma_ * (reward / p_arm) / static_cast<double>(k_);
  }

 private:
  int k_;
  double gamma_;
  RngStream rng_;
  std::vector<double> log_weights_;
  std::vector<double> probs_;
  double last_prob_ = 1.0;
};

}  // namespace abob
