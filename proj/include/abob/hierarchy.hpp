#pragma once

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "abob/partition.hpp"
#include "abob/policies.hpp"
#include "abob/policy.hpp"
#include "abob/rng.hpp"

namespace abob {

// Two-level bandit over a partition: a parent policy picks a cluster
// (virtual arm), that cluster's child policy picks the physical arm, and
// both levels are updated with the raw observed reward. Only the selected
// cluster's child is touched, so the per-step work is p plus the size of
// the selected cluster.
//
// The composite is itself a Policy, which makes the degenerate partitions
// exact: with p = 1 it plays precisely like the flat child, with p = k like
// the flat parent.
class HierarchicalBandit final : public Policy {
 public:
  HierarchicalBandit(Partition partition, std::unique_ptr<Policy> parent,
                     std::vector<std::unique_ptr<Policy>> children)
      : partition_(std::move(partition)), parent_(std::move(parent)),
        children_(std::move(children)) {
    if (parent_->arm_count() != partition_.cluster_count())
      throw std::invalid_argument("HierarchicalBandit: parent size != cluster count");
    if (static_cast<int>(children_.size()) != partition_.cluster_count())
      throw std::invalid_argument("HierarchicalBandit: one child per cluster required");
    for (int c = 0; c < partition_.cluster_count(); ++c)
      if (children_[c]->arm_count() != partition_.cluster_size(c))
        throw std::invalid_argument("HierarchicalBandit: child " + std::to_string(c) +
                                    " size != cluster size");
  }

  int arm_count() const override { return partition_.arm_count(); }
  const Partition& partition() const { return partition_; }
  Policy& parent() { return *parent_; }
  Policy& child(int cluster) { return *children_.at(cluster); }
  int last_cluster() const { return last_cluster_; }

  // Product measure over (cluster, local arm); diagnostic, not on the
  // per-step path.
  const std::vector<double>& probabilities() override {
    probs_.assign(partition_.arm_count(), 0.0);
    const auto parent_probs = parent_->probabilities();
    for (int c = 0; c < partition_.cluster_count(); ++c) {
      const auto& child_probs = children_[c]->probabilities();
      const auto& members = partition_.cluster(c);
      for (std::size_t j = 0; j < members.size(); ++j)
        probs_[members[j]] = parent_probs[c] * child_probs[j];
    }
    return probs_;
  }

  int select() override {
    last_cluster_ = parent_->select();
    const int local = children_[last_cluster_]->select();
    return partition_.global_arm(last_cluster_, local);
  }

  void update(int arm, double reward) override {
    const int cluster = partition_.cluster_of(arm);
    children_[cluster]->update(partition_.local_index(arm), reward);
    parent_->update(cluster, reward);
  }

 private:
  Partition partition_;
  std::unique_ptr<Policy> parent_;
  std::vector<std::unique_ptr<Policy>> children_;
  std::vector<double> probs_;
  int last_cluster_ = -1;
};

// Wires up the composite: parent over p virtual arms with the full horizon,
// child i over its cluster with the expected per-cluster share T/p of the
// horizon (EXP3 children use their own cluster size in the gamma schedule).
// Streams are derived as ("parent") and ("child", i) from `rng`.
inline std::unique_ptr<HierarchicalBandit> make_hierarchical(
    Partition partition, PolicyKind parent_kind, PolicyKind child_kind,
    long long horizon, const RngStream& rng,
    double ucb_alpha = Ucb1::kDefaultAlpha) {
  if (horizon < 1) throw std::invalid_argument("make_hierarchical: horizon must be >= 1");
  const int p = partition.cluster_count();
  const long long child_horizon = std::max<long long>(1, horizon / p);
  auto parent = make_policy(parent_kind, p, horizon, rng.derive("parent"), ucb_alpha);
  std::vector<std::unique_ptr<Policy>> children;
  children.reserve(p);
  for (int c = 0; c < p; ++c)
    children.push_back(make_policy(child_kind, partition.cluster_size(c), child_horizon,
                                   rng.derive("child", static_cast<std::uint64_t>(c)),
                                   ucb_alpha));
  return std::make_unique<HierarchicalBandit>(std::move(partition), std::move(parent),
                                              std::move(children));
}

}  // namespace abob
