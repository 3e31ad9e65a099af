#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace sgaug {

// 64-bit FNV-1a over the bytes of `text`.
constexpr std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Seed used for a single image: hashing makes results independent of the
// order in which images are processed.
constexpr std::uint64_t image_seed(std::string_view image_id,
                                   std::uint64_t master_seed) {
  return fnv1a64(image_id) ^ master_seed;
}

/// Seeded generator passed explicitly to every sampling routine.
///
/// Distributions are implemented here rather than through <random>'s
/// distribution classes, whose output is not specified across standard
/// library implementations; draws are therefore reproducible everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, n). n must be > 0.
  std::size_t uniform_index(std::size_t n);

  // Uniform real in [0, 1) with 53 random bits.
  double uniform_real() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Index drawn with probability weights[i] / sum(weights). Weights must be
  // non-negative with a positive sum.
  std::size_t weighted_index(std::span<const double> weights);

  // Independent child generator; advances this one.
  Rng split() { return Rng(next_u64() ^ 0x9E3779B97F4A7C15ULL); }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[uniform_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sgaug
