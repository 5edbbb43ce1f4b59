#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "abob/grid.hpp"
#include "abob/rng.hpp"
#include "abob/trace.hpp"

namespace abob {

enum class RewardKind { kBernoulli, kUniformWidth, kMean };

inline RewardKind parse_reward_kind(const std::string& name) {
  if (name == "bernoulli") return RewardKind::kBernoulli;
  if (name == "uniform") return RewardKind::kUniformWidth;
  if (name == "mean") return RewardKind::kMean;
  throw std::invalid_argument("unknown reward kind: " + name);
}

// Draws a realized reward around `mean`. Bernoulli and uniform-width both
// consume exactly one uniform, so the stream position never depends on the
// arm that was chosen. kMean is deterministic.
inline double draw_reward(double mean, RewardKind kind, double width, RngStream& rng) {
  switch (kind) {
    case RewardKind::kBernoulli:
      if (!(mean >= 0.0 && mean <= 1.0))
        throw std::out_of_range("draw_reward: bernoulli mean outside [0,1]");
      return rng.next_uniform() < mean ? 1.0 : 0.0;
    case RewardKind::kUniformWidth: {
      if (!(width >= 0.0) || mean - width / 2.0 < 0.0 || mean + width / 2.0 > 1.0)
        throw std::out_of_range("draw_reward: uniform support escapes [0,1]");
      return mean + (rng.next_uniform() - 0.5) * width;
    }
    case RewardKind::kMean:
      return mean;
  }
  throw std::invalid_argument("draw_reward: unknown kind");
}

// Oblivious reward generator. advance(t) must be called once per round, in
// order, and fixes the full mean vector for that round before any arm is
// revealed; draw(arm) then realizes the chosen arm's reward from the mean.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual int arm_count() const = 0;
  virtual const std::vector<double>& advance(long long t) = 0;
  virtual double draw(int arm) = 0;

 protected:
  void check_step_order(long long t) {
    if (t != next_t_)
      throw std::logic_error("Environment::advance called out of order: expected t=" +
                             std::to_string(next_t_) + ", got " + std::to_string(t));
    ++next_t_;
  }

 private:
  long long next_t_ = 0;
};

// --- Mean constructions -----------------------------------------------------

// Single optimal arm at (1+delta)/2, all others at (1-delta)/2.
inline std::vector<double> stochastic_gap_means(int arms, double delta, int best) {
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::out_of_range("stochastic_gap_means: delta outside [0,1]");
  if (best < 0 || best >= arms)
    throw std::out_of_range("stochastic_gap_means: best arm out of range");
  std::vector<double> means(arms, (1.0 - delta) / 2.0);
  means[best] = (1.0 + delta) / 2.0;
  return means;
}

// Phase index for the exponentially lengthening schedule: phase m spans
// [base * (2^m - 1), base * (2^(m+1) - 1)).
inline int phase_of_step(long long t, long long base_phase) {
  if (t < 0 || base_phase < 1)
    throw std::invalid_argument("phase_of_step: t >= 0 and base_phase >= 1 required");
  int m = 0;
  long long start = 0;
  long long length = base_phase;
  while (t >= start + length) {
    start += length;
    length *= 2;
    ++m;
  }
  return m;
}

// (optimal, suboptimal) means alternate between (delta, 0) and (1, 1-delta)
// across exponentially lengthening phases; the optimal arm always leads by
// exactly delta.
inline std::vector<double> phased_adversarial_means(int arms, long long t, double delta,
                                                    int best, long long base_phase) {
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::out_of_range("phased_adversarial_means: delta outside [0,1]");
  if (best < 0 || best >= arms)
    throw std::out_of_range("phased_adversarial_means: best arm out of range");
  const bool even = phase_of_step(t, base_phase) % 2 == 0;
  const double optimal = even ? delta : 1.0;
  const double suboptimal = even ? 0.0 : 1.0 - delta;
  std::vector<double> means(arms, suboptimal);
  means[best] = optimal;
  return means;
}

// Cone reward around the current optimum: 1 - ||a_star - x||. Both points
// must lie in Q = [0, extent]^d, whose diameter is 1, so the value is in [0,1].
inline double traveling_mean(const std::vector<double>& position,
                             const std::vector<double>& a_star, double extent) {
  for (const auto* point : {&position, &a_star})
    for (double x : *point)
      if (!(x >= 0.0 && x <= extent + 1e-12))
        throw std::domain_error("traveling_mean: point outside the hypercube");
  return 1.0 - euclidean_distance(position, a_star);
}

// p clusters of m arms. Cluster 0 spans [mu_star - l, mu_star]; every other
// cluster spans [mu_star - L - l, mu_star - L]. Arms ascend within a cluster
// and the top of each range is always hit, so the best-of-cluster gaps equal
// L exactly.
inline std::vector<double> clustered_gap_means(int clusters, int arms_per_cluster,
                                               double gap_between, double gap_within,
                                               double mu_star) {
  if (clusters < 1 || arms_per_cluster < 1)
    throw std::invalid_argument("clustered_gap_means: need clusters >= 1 and arms >= 1");
  if (!(mu_star <= 1.0) || mu_star - gap_between - gap_within < 0.0)
    throw std::out_of_range("clustered_gap_means: means escape [0,1]");
  std::vector<double> means;
  means.reserve(static_cast<std::size_t>(clusters) * arms_per_cluster);
  for (int c = 0; c < clusters; ++c) {
    const double top = c == 0 ? mu_star : mu_star - gap_between;
    const double bottom = top - gap_within;
    for (int j = 0; j < arms_per_cluster; ++j) {
      means.push_back(arms_per_cluster == 1
                          ? top
                          : bottom + gap_within * static_cast<double>(j) /
                                         static_cast<double>(arms_per_cluster - 1));
    }
  }
  return means;
}

// --- Environments ------------------------------------------------------------

// Stationary means, noisy draws.
class StationaryEnvironment final : public Environment {
 public:
  StationaryEnvironment(std::vector<double> means, RewardKind kind, double width,
                        RngStream rng)
      : means_(std::move(means)), kind_(kind), width_(width), rng_(rng) {}

  int arm_count() const override { return static_cast<int>(means_.size()); }

  const std::vector<double>& advance(long long t) override {
    check_step_order(t);
    return means_;
  }

  double draw(int arm) override { return draw_reward(means_.at(arm), kind_, width_, rng_); }

 private:
  std::vector<double> means_;
  RewardKind kind_;
  double width_;
  RngStream rng_;
};

// Phased single-optimal-arm adversary.
class PhasedAdversarialEnvironment final : public Environment {
 public:
  PhasedAdversarialEnvironment(int arms, double delta, int best, long long base_phase,
                               RewardKind kind, double width, RngStream rng)
      : arms_(arms), delta_(delta), best_(best), base_phase_(base_phase), kind_(kind),
        width_(width), rng_(rng) {}

  int arm_count() const override { return arms_; }

  const std::vector<double>& advance(long long t) override {
    check_step_order(t);
    means_ = phased_adversarial_means(arms_, t, delta_, best_, base_phase_);
    return means_;
  }

  double draw(int arm) override { return draw_reward(means_.at(arm), kind_, width_, rng_); }

 private:
  int arms_;
  double delta_;
  int best_;
  long long base_phase_;
  RewardKind kind_;
  double width_;
  RngStream rng_;
  std::vector<double> means_;
};

// Optimal point walking through the hypercube; arm means follow the cone
// surface, which is 1-Lipschitz on the grid at every round. sigma = 0 gives
// the static metric environment with the optimum at the cube center.
class TravelingEnvironment final : public Environment {
 public:
  TravelingEnvironment(ArmGrid grid, double sigma, RewardKind kind, double width,
                       RngStream rng)
      : grid_(std::move(grid)), sigma_(sigma), kind_(kind), width_(width), rng_(rng),
        a_star_(grid_.center()), means_(grid_.arm_count()) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("TravelingEnvironment: sigma < 0");
  }

  int arm_count() const override { return grid_.arm_count(); }
  const ArmGrid& grid() const { return grid_; }
  const std::vector<double>& optimum() const { return a_star_; }

  const std::vector<double>& advance(long long t) override {
    check_step_order(t);
    if (t > 0 && sigma_ > 0.0) {
      for (double& coord : a_star_) coord += sigma_ * rng_.next_normal();
      grid_.clip(a_star_);
    } else if (t > 0) {
      return means_;  // static optimum, surface already computed
    }
    for (int i = 0; i < grid_.arm_count(); ++i)
      means_[i] = traveling_mean(grid_.position(i), a_star_, grid_.extent());
    return means_;
  }

  double draw(int arm) override { return draw_reward(means_.at(arm), kind_, width_, rng_); }

 private:
  ArmGrid grid_;
  double sigma_;
  RewardKind kind_;
  double width_;
  RngStream rng_;
  std::vector<double> a_star_;
  std::vector<double> means_;
};

// Replays a recorded trace; the interpolated values are both the means and
// the realized rewards.
class TraceEnvironment final : public Environment {
 public:
  explicit TraceEnvironment(RewardTrace trace)
      : trace_(std::move(trace)), means_(trace_.arm_count()) {}

  int arm_count() const override { return trace_.arm_count(); }
  const RewardTrace& trace() const { return trace_; }

  const std::vector<double>& advance(long long t) override {
    check_step_order(t);
    const long long trace_t = trace_.first_time() + t;
    for (int i = 0; i < arm_count(); ++i) means_[i] = trace_mean(trace_, trace_t, i);
    return means_;
  }

  double draw(int arm) override { return means_.at(arm); }

 private:
  RewardTrace trace_;
  std::vector<double> means_;
};

}  // namespace abob
