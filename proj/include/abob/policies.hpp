#pragma once

#include <memory>

#include "abob/exp3.hpp"
#include "abob/policy.hpp"
#include "abob/tsallis.hpp"
#include "abob/ucb1.hpp"

namespace abob {

// Builds a flat policy over `arms`. `horizon` sizes the EXP3 exploration
// rate (ignored by the other kinds); UCB1 ignores the stream.
inline std::unique_ptr<Policy> make_policy(PolicyKind kind, int arms,
                                           long long horizon, RngStream rng,
                                           double ucb_alpha = Ucb1::kDefaultAlpha) {
  switch (kind) {
    case PolicyKind::kExp3:
      return std::make_unique<Exp3>(arms, exp3_gamma(arms, horizon), rng);
    case PolicyKind::kTsallisInf:
      return std::make_unique<TsallisInf>(arms, rng);
    case PolicyKind::kUcb1:
      return std::make_unique<Ucb1>(arms, ucb_alpha);
  }
  throw std::invalid_argument("make_policy: unknown kind");
}

}  // namespace abob
