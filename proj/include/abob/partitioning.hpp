#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "abob/grid.hpp"
#include "abob/partition.hpp"
#include "abob/rng.hpp"

namespace abob {

// Per-arm feature vectors (grid positions for simulations, normalized
// configuration parameters for traces). All rows share one dimension.
using ArmFeatures = std::vector<std::vector<double>>;

// k/p consecutive arms per cluster. The other constructors reduce to this
// layout in their degenerate cases.
inline Partition block_partition(int arms, int clusters) {
  if (clusters < 1 || arms < 1 || arms % clusters != 0)
    throw std::invalid_argument("block_partition: cluster count " + std::to_string(clusters) +
                                " does not divide " + std::to_string(arms) + " arms");
  const int size = arms / clusters;
  std::vector<std::vector<int>> groups(clusters);
  for (int c = 0; c < clusters; ++c) {
    groups[c].resize(size);
    std::iota(groups[c].begin(), groups[c].end(), c * size);
  }
  return Partition(std::move(groups));
}

// Axis-aligned equal-volume blocks of the lattice: p^(1/d) blocks per
// dimension, each holding (k/p) arms. Clusters are ordered lexicographically
// by block origin.
inline Partition grid_partition(const ArmGrid& grid, int clusters) {
  const int d = grid.dimension();
  const int side = grid.side();
  const int block_side = integer_root(clusters, d);
  if (block_side < 1 || side % block_side != 0) {
    std::string valid;
    for (int m = 1; m <= side; ++m) {
      if (side % m != 0) continue;
      long long p = 1;
      for (int j = 0; j < d; ++j) p *= m;
      valid += (valid.empty() ? "" : ", ") + std::to_string(p);
    }
    throw std::invalid_argument("grid_partition: p=" + std::to_string(clusters) +
                                " incompatible with k=" + std::to_string(grid.arm_count()) +
                                ", d=" + std::to_string(d) + "; valid p: " + valid);
  }
  const int arms_per_side = side / block_side;
  std::vector<std::vector<int>> groups(clusters);
  for (int arm = 0; arm < grid.arm_count(); ++arm) {
    int block = 0;
    for (int dim = 0; dim < d; ++dim) {
      // Per-dimension lattice index (first dimension major).
      int divisor = 1;
      for (int j = dim + 1; j < d; ++j) divisor *= side;
      const int index = (arm / divisor) % side;
      block = block * block_side + index / arms_per_side;
    }
    groups[block].push_back(arm);
  }
  return Partition(std::move(groups));
}

// Uniformly random permutation of the arms cut into p consecutive blocks.
inline Partition shuffled_partition(int arms, int clusters, RngStream& rng) {
  if (clusters < 1 || arms < 1 || arms % clusters != 0)
    throw std::invalid_argument("shuffled_partition: cluster count must divide arm count");
  std::vector<int> order(arms);
  std::iota(order.begin(), order.end(), 0);
  for (int i = arms - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[i], order[j]);
  }
  const int size = arms / clusters;
  std::vector<std::vector<int>> groups(clusters);
  for (int c = 0; c < clusters; ++c)
    groups[c].assign(order.begin() + c * size, order.begin() + (c + 1) * size);
  return Partition(std::move(groups));
}

// Arm i joins cluster i mod p, so every cluster spans the whole index range.
inline Partition round_robin_partition(int arms, int clusters) {
  if (clusters < 1 || arms < 1 || arms % clusters != 0)
    throw std::invalid_argument("round_robin_partition: cluster count must divide arm count");
  std::vector<std::vector<int>> groups(clusters);
  for (int arm = 0; arm < arms; ++arm) groups[arm % clusters].push_back(arm);
  return Partition(std::move(groups));
}

// Lloyd's algorithm with k-means++ seeding. Runs until the max centroid
// shift drops below 1e-9 or 100 iterations; an emptied cluster is re-seeded
// from the point farthest from its assigned centroid. Clusters are ordered
// by their smallest member for deterministic logs.
inline Partition kmeans_partition(const ArmFeatures& features, int clusters, RngStream& rng) {
  const int k = static_cast<int>(features.size());
  if (k == 0) throw std::invalid_argument("kmeans_partition: no features");
  if (clusters < 1 || clusters > k)
    throw std::invalid_argument("kmeans_partition: need 1 <= p <= k");
  const std::size_t dim = features[0].size();
  for (const auto& f : features)
    if (f.size() != dim) throw std::invalid_argument("kmeans_partition: ragged features");

  // k-means++ seeding.
  std::vector<std::vector<double>> centroids;
  centroids.reserve(clusters);
  centroids.push_back(features[rng.next_below(k)]);
  std::vector<double> dist_sq(k);
  while (static_cast<int>(centroids.size()) < clusters) {
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centroids)
        best = std::min(best, euclidean_distance(features[i], c));
      dist_sq[i] = best * best;
      total += dist_sq[i];
    }
    if (total <= 0.0) {
      // All remaining points coincide with a centroid; any point works.
      centroids.push_back(features[rng.next_below(k)]);
      continue;
    }
    double u = rng.next_uniform() * total;
    int chosen = k - 1;
    for (int i = 0; i < k; ++i) {
      u -= dist_sq[i];
      if (u <= 0.0) {
        chosen = i;
        break;
      }
    }
    centroids.push_back(features[chosen]);
  }

  std::vector<int> assignment(k, 0);
  for (int iter = 0; iter < 100; ++iter) {
    for (int i = 0; i < k; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < clusters; ++c) {
        const double d = euclidean_distance(features[i], centroids[c]);
        if (d < best) {
          best = d;
          assignment[i] = c;
        }
      }
    }
    // Re-seed empty clusters from the farthest point.
    std::vector<int> sizes(clusters, 0);
    for (int i = 0; i < k; ++i) ++sizes[assignment[i]];
    for (int c = 0; c < clusters; ++c) {
      if (sizes[c] > 0) continue;
      int farthest = 0;
      double far_dist = -1.0;
      for (int i = 0; i < k; ++i) {
        if (sizes[assignment[i]] <= 1) continue;
        const double d = euclidean_distance(features[i], centroids[assignment[i]]);
        if (d > far_dist) {
          far_dist = d;
          farthest = i;
        }
      }
      --sizes[assignment[farthest]];
      assignment[farthest] = c;
      sizes[c] = 1;
      centroids[c] = features[farthest];
    }

    double shift = 0.0;
    for (int c = 0; c < clusters; ++c) {
      std::vector<double> mean(dim, 0.0);
      int count = 0;
      for (int i = 0; i < k; ++i) {
        if (assignment[i] != c) continue;
        for (std::size_t j = 0; j < dim; ++j) mean[j] += features[i][j];
        ++count;
      }
      for (std::size_t j = 0; j < dim; ++j) mean[j] /= static_cast<double>(count);
      shift = std::max(shift, euclidean_distance(mean, centroids[c]));
      centroids[c] = std::move(mean);
    }
    if (shift < 1e-9) break;
  }

  std::vector<std::vector<int>> groups(clusters);
  for (int i = 0; i < k; ++i) groups[assignment[i]].push_back(i);
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return Partition(std::move(groups));
}

// Per-arm empirical Lipschitz ratio over the n nearest neighbors:
// ell_i = (1/n) * sum_j |r_j - r_i| / |x_j - x_i|.
inline std::vector<double> lipschitz_estimate(const ArmFeatures& features,
                                              const std::vector<double>& rewards,
                                              int neighbors) {
  const int k = static_cast<int>(features.size());
  if (static_cast<int>(rewards.size()) != k)
    throw std::invalid_argument("lipschitz_estimate: rewards/features size mismatch");
  if (neighbors < 1 || neighbors >= k)
    throw std::invalid_argument("lipschitz_estimate: need 1 <= n < k");

  std::vector<double> ell(k, 0.0);
  std::vector<std::pair<double, int>> order;
  order.reserve(k - 1);
  for (int i = 0; i < k; ++i) {
    order.clear();
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      order.emplace_back(euclidean_distance(features[i], features[j]), j);
    }
    std::partial_sort(order.begin(), order.begin() + neighbors, order.end());
    double sum = 0.0;
    for (int m = 0; m < neighbors; ++m) {
      const auto& [dist, j] = order[m];
      if (!(dist > 0.0))
        throw std::invalid_argument("lipschitz_estimate: duplicate feature points (arms " +
                                    std::to_string(i) + ", " + std::to_string(j) + ")");
      sum += std::abs(rewards[j] - rewards[i]) / dist;
    }
    ell[i] = sum / static_cast<double>(neighbors);
  }
  return ell;
}

// --- Partition CSV (`arm,cluster`) -------------------------------------------

inline void save_partition_csv(const Partition& partition, std::ostream& out) {
  out << "arm,cluster\n";
  for (int arm = 0; arm < partition.arm_count(); ++arm)
    out << arm << "," << partition.cluster_of(arm) << "\n";
}

inline void save_partition_csv(const Partition& partition, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write partition file: " + path);
  save_partition_csv(partition, static_cast<std::ostream&>(out));
}

inline Partition load_partition_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open partition file: " + path);
  std::string line;
  if (!std::getline(in, line) || (line != "arm,cluster" && line != "arm,cluster\r"))
    throw std::runtime_error(path + ":1: expected header 'arm,cluster'");
  std::vector<std::pair<int, int>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string arm_field, cluster_field;
    if (!std::getline(row, arm_field, ',') || !std::getline(row, cluster_field, ','))
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed row");
    try {
      rows.emplace_back(std::stoi(arm_field), std::stoi(cluster_field));
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad integer");
    }
  }
  if (rows.empty()) throw std::runtime_error(path + ": empty partition");
  int max_cluster = 0;
  for (const auto& [arm, cluster] : rows) max_cluster = std::max(max_cluster, cluster);
  std::vector<std::vector<int>> groups(max_cluster + 1);
  for (const auto& [arm, cluster] : rows) {
    if (cluster < 0) throw std::runtime_error(path + ": negative cluster id");
    groups[cluster].push_back(arm);
  }
  return Partition(std::move(groups));
}

}  // namespace abob
