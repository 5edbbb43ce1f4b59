#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "abob/policy.hpp"
#include "abob/rng.hpp"

namespace abob {

struct TsallisSolution {
  std::vector<double> probs;
  double normalizer;  // the x < min(losses) with sum_i 4/(eta (L_i - x))^2 = 1
};

// 1/2-Tsallis-INF selection distribution: p_i = 4 (eta_t (L_i - x))^-2 with
// eta_t = 1/sqrt(t) and x the unique normalizer below min(L). Solved in gap
// coordinates z = min(L) - x, which makes the result invariant under adding
// a constant to all losses. f(z) = sum p_i(z) - 1 is convex and decreasing
// on z in [2/eta, 2 sqrt(k)/eta], so Newton from the left edge converges
// monotonically; a bisection safeguard keeps the iterate bracketed.
inline TsallisSolution tsallis_probabilities(std::span<const double> losses,
                                             long long round) {
  const int k = static_cast<int>(losses.size());
  if (k < 1) throw std::invalid_argument("tsallis_probabilities: empty loss vector");
  if (round < 1) throw std::invalid_argument("tsallis_probabilities: round must be >= 1");
  const double eta = 1.0 / std::sqrt(static_cast<double>(round));
  const double min_loss = *std::min_element(losses.begin(), losses.end());

  std::vector<double> gaps(k);
  for (int i = 0; i < k; ++i) gaps[i] = losses[i] - min_loss;

  const auto sum_probs = [&](double z) {
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
      const double h = eta * (gaps[i] + z);
      s += 4.0 / (h * h);
    }
    return s;
  };

  // sum == 1 forces the smallest gap term <= 1 and all k terms <= 1 jointly.
  double lo = 2.0 / eta;
  double hi = 2.0 * std::sqrt(static_cast<double>(k)) / eta;
  double z = lo;
  double f = sum_probs(z) - 1.0;
  bool converged = std::abs(f) <= 1e-12;
  for (int iter = 0; iter < 200 && !converged; ++iter) {
    if (f > 0.0) lo = z; else hi = z;
    double deriv = 0.0;
    for (int i = 0; i < k; ++i) {
      const double g = gaps[i] + z;
      deriv -= 8.0 / (eta * eta * g * g * g);
    }
    double next = z - f / deriv;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    z = next;
    f = sum_probs(z) - 1.0;
    converged = std::abs(f) <= 1e-12;
  }
  if (!converged)
    throw std::runtime_error("tsallis_probabilities: normalization did not converge");

  TsallisSolution out;
  out.normalizer = min_loss - z;
  out.probs.resize(k);
  for (int i = 0; i < k; ++i) {
    const double h = eta * (gaps[i] + z);
    out.probs[i] = 4.0 / (h * h);
  }
  return out;
}

// Tsallis-INF policy over cumulative importance-weighted loss estimates.
// Consumes losses: update() adds (1 - reward) / p_arm to the chosen arm.
class TsallisInf final : public Policy {
 public:
  TsallisInf(int arms, RngStream rng)
      : k_(arms), rng_(rng), cumulative_losses_(arms, 0.0) {
    if (arms < 1) throw std::invalid_argument("TsallisInf: arms must be >= 1");
  }

  int arm_count() const override { return k_; }
  long long round() const { return round_; }
  const std::vector<double>& cumulative_losses() const { return cumulative_losses_; }

  const std::vector<double>& probabilities() override {
    probs_ = tsallis_probabilities(cumulative_losses_, round_).probs;
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

  void update(int arm, double reward, double p_arm) {
    if (arm < 0 || arm >= k_) throw std::out_of_range("TsallisInf::update: arm out of range");
    if (!(p_arm > 0.0)) throw std::invalid_argument("TsallisInf::update: p_arm must be > 0");
    cumulative_losses_[arm] += loss_from_reward(reward) / p_arm;
    ++round_;
  }

 private:
  int k_;
  RngStream rng_;
  std::vector<double> cumulative_losses_;
  std::vector<double> probs_;
  long long round_ = 1;
  double last_prob_ = 1.0;
};

}  // namespace abob
