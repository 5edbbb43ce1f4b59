#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace abob {

// Counter-based deterministic random stream built on the splitmix64 mixer.
// A stream is (key, counter); draws advance only the counter, so deriving
// child streams from the key is position-independent: derive(label) called
// twice yields the same child stream, and different labels yield streams
// with unrelated output sequences. All draws are computed from raw 64-bit
// mixes, never from std::*_distribution, so sequences are identical across
// platforms and standard libraries.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : key_(mix(seed ^ kSeedTag)) {}

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

  // Uniform on [0, 1), 53 mantissa bits.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) by rejection; bound >= 1.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % bound;
  }

  // Standard normal via Box-Muller; consumes exactly two uniforms.
  double next_normal() {
    double u1 = next_uniform();
    double u2 = next_uniform();
    while (u1 <= 0.0) u1 = next_uniform();  // guard log(0)
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Child stream keyed by (this stream's key, label). Does not advance
  // this stream and is independent of its position.
  [[nodiscard]] RngStream derive(std::string_view label) const {
    return RngStream(mix(key_ ^ hash_label(label)), 0);
  }

  [[nodiscard]] RngStream derive(std::string_view label, std::uint64_t index) const {
    return RngStream(mix(mix(key_ ^ hash_label(label)) + (index + 1) * kGamma), 0);
  }

 private:
  RngStream(std::uint64_t key, std::uint64_t counter)
      : key_(key), counter_(counter) {}

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kSeedTag = 0xA0B0B5EEDull;

  // splitmix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  // FNV-1a over the label bytes.
  static std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : label) {
      h ^= c;
      h *= 0x100000001B3ull;
    }
    return h;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Samples an index from a categorical distribution, consuming exactly one
// uniform draw. Entries must be non-negative and sum to 1 within 1e-6.
inline int sample_categorical(std::span<const double> probs, RngStream& rng) {
  if (probs.empty()) throw std::invalid_argument("sample_categorical: empty distribution");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("sample_categorical: negative or NaN probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw std::invalid_argument("sample_categorical: probabilities sum to " + std::to_string(sum));
  const double u = rng.next_uniform() * sum;
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    cum += probs[i];
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

inline int sample_categorical(const std::vector<double>& probs, RngStream& rng) {
  return sample_categorical(std::span<const double>(probs), rng);
}

}  // namespace abob
