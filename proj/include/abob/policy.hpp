#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "abob/rng.hpp"

namespace abob {

// Converts a gain in [0,1] to the loss 1 - r consumed by loss-based policies.
inline double loss_from_reward(double reward) {
  if (!(reward >= 0.0 && reward <= 1.0))
    throw std::out_of_range("loss_from_reward: reward outside [0,1]");
  return 1.0 - reward;
}

enum class PolicyKind { kExp3, kTsallisInf, kUcb1 };

inline PolicyKind parse_policy_kind(std::string_view name) {
  if (name == "exp3") return PolicyKind::kExp3;
  if (name == "tsallis") return PolicyKind::kTsallisInf;
  if (name == "ucb1") return PolicyKind::kUcb1;
  throw std::invalid_argument("unknown policy kind: " + std::string(name));
}

inline const char* policy_kind_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kExp3: return "exp3";
    case PolicyKind::kTsallisInf: return "tsallis";
    case PolicyKind::kUcb1: return "ucb1";
  }
  return "?";
}

// Select-then-update contract shared by every bandit policy.
//
// probabilities() is the distribution the next select() would draw from; it
// always has length arm_count(), non-negative entries, and sums to 1 (index
// policies expose a one-hot vector). update() must be called with the arm
// returned by the most recent select(); the runner enforces this ordering.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual int arm_count() const = 0;
  virtual const std::vector<double>& probabilities() = 0;
  virtual int select() = 0;
  virtual void update(int arm, double reward) = 0;
};

}  // namespace abob
