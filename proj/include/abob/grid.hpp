#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace abob {

// Exact integer d-th root, or -1 if none.
inline int integer_root(int value, int degree) {
  if (value < 1) return -1;
  int r = static_cast<int>(std::llround(std::pow(static_cast<double>(value),
                                                 1.0 / static_cast<double>(degree))));
  for (int cand = std::max(1, r - 1); cand <= r + 1; ++cand) {
    long long pow = 1;
    for (int j = 0; j < degree; ++j) pow *= cand;
    if (pow == value) return cand;
  }
  return -1;
}

// k arms on an axis-aligned lattice filling the hypercube Q = [0, 1/sqrt(d)]^d,
// endpoints included, so opposite corners are exactly distance 1 apart.
// Arm order is lexicographic in the per-dimension indices (first dimension
// major). Per-dimension spacing is (1/sqrt(d)) / (k^(1/d) - 1).
class ArmGrid {
 public:
  ArmGrid(int arms, int dimension) : k_(arms), d_(dimension) {
    if (dimension < 1 || dimension > 3)
      throw std::invalid_argument("ArmGrid: dimension must be 1, 2, or 3");
    side_ = integer_root(arms, dimension);
    if (side_ < 2)
      throw std::invalid_argument("ArmGrid: arm count " + std::to_string(arms) +
                                  " is not m^" + std::to_string(dimension) +
                                  " for some m >= 2");
    extent_ = 1.0 / std::sqrt(static_cast<double>(dimension));
    spacing_ = extent_ / static_cast<double>(side_ - 1);
    positions_.resize(k_, std::vector<double>(d_));
    for (int arm = 0; arm < k_; ++arm) {
      int rest = arm;
      for (int dim = d_ - 1; dim >= 0; --dim) {
        positions_[arm][dim] = static_cast<double>(rest % side_) * spacing_;
        rest /= side_;
      }
    }
  }

  int arm_count() const { return k_; }
  int dimension() const { return d_; }
  int side() const { return side_; }
  double extent() const { return extent_; }    // per-dimension edge length of Q
  double spacing() const { return spacing_; }  // distance between lattice neighbors
  const std::vector<std::vector<double>>& positions() const { return positions_; }
  const std::vector<double>& position(int arm) const { return positions_.at(arm); }

  std::vector<double> center() const { return std::vector<double>(d_, extent_ / 2.0); }

  // Clamp a point into Q coordinate-wise.
  void clip(std::vector<double>& point) const {
    for (double& x : point) x = std::min(std::max(x, 0.0), extent_);
  }

 private:
  int k_;
  int d_;
  int side_;
  double extent_;
  double spacing_;
  std::vector<std::vector<double>> positions_;
};

inline double euclidean_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

}  // namespace abob
