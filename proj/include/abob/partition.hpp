#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace abob {

// Mutually exclusive, collectively exhaustive grouping of the arm indices
// 0..k-1 into non-empty clusters. Cluster members are stored sorted
// ascending; a member's position in that order is its local index, which
// fixes the local<->global mapping used by the hierarchical composite.
class Partition {
 public:
  explicit Partition(std::vector<std::vector<int>> clusters)
      : clusters_(std::move(clusters)) {
    std::size_t total = 0;
    for (auto& cluster : clusters_) {
      if (cluster.empty()) throw std::invalid_argument("Partition: empty cluster");
      std::sort(cluster.begin(), cluster.end());
      total += cluster.size();
    }
    arm_count_ = static_cast<int>(total);
    cluster_of_.assign(arm_count_, -1);
    local_index_.assign(arm_count_, -1);
    for (std::size_t c = 0; c < clusters_.size(); ++c) {
      for (std::size_t j = 0; j < clusters_[c].size(); ++j) {
        const int arm = clusters_[c][j];
        if (arm < 0 || arm >= arm_count_)
          throw std::invalid_argument("Partition: arm index " + std::to_string(arm) +
                                      " outside 0.." + std::to_string(arm_count_ - 1));
        if (cluster_of_[arm] != -1)
          throw std::invalid_argument("Partition: arm " + std::to_string(arm) +
                                      " appears in two clusters");
        cluster_of_[arm] = static_cast<int>(c);
        local_index_[arm] = static_cast<int>(j);
      }
    }
  }

  int arm_count() const { return arm_count_; }
  int cluster_count() const { return static_cast<int>(clusters_.size()); }
  const std::vector<std::vector<int>>& clusters() const { return clusters_; }
  const std::vector<int>& cluster(int c) const { return clusters_.at(c); }
  int cluster_size(int c) const { return static_cast<int>(clusters_.at(c).size()); }

  int cluster_of(int arm) const { return cluster_of_.at(arm); }
  int local_index(int arm) const { return local_index_.at(arm); }
  int global_arm(int c, int local) const { return clusters_.at(c).at(local); }

 private:
  std::vector<std::vector<int>> clusters_;
  std::vector<int> cluster_of_;
  std::vector<int> local_index_;
  int arm_count_ = 0;
};

// Smallest ell such that |c_t(a) - c_t(b)| <= ell for every cluster, round,
// and within-cluster arm pair. `mean_rewards[t]` is the length-k mean vector
// at round t. Runs the brute-force max over pairs.
inline double ell_of_partition(const Partition& partition,
                               const std::vector<std::vector<double>>& mean_rewards) {
  if (mean_rewards.empty())
    throw std::invalid_argument("ell_of_partition: need at least one round of means");
  double ell = 0.0;
  for (const auto& means : mean_rewards) {
    if (static_cast<int>(means.size()) < partition.arm_count())
      throw std::invalid_argument("ell_of_partition: mean vector shorter than arm count");
    for (const auto& cluster : partition.clusters()) {
      for (std::size_t i = 0; i < cluster.size(); ++i) {
        for (std::size_t j = i + 1; j < cluster.size(); ++j) {
          const double diff = std::abs(means[cluster[i]] - means[cluster[j]]);
          if (diff > ell) ell = diff;
        }
      }
    }
  }
  return ell;
}

}  // namespace abob
