#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace typelink {

/// Seed constant folded into the feature hash so the hashed feature space is
/// pinned independently of platform or standard-library internals.
inline constexpr std::uint64_t kFeatureHashSeed = 0x7c3a9d15f0e842b1ULL;

/// FNV-1a, 64-bit.
constexpr std::uint64_t fnv1a64(std::string_view data,
                                std::uint64_t seed = kFeatureHashSeed) {
  std::uint64_t h = 14695981039346656037ULL ^ seed;
  for (char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

/// SplitMix64. Every seeded operation in the toolkit draws from this
/// generator; std::shuffle / std::uniform_int_distribution are
/// implementation-defined and would break cross-platform reproducibility.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  /// Uniform in [lo, hi).
  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

 private:
  std::uint64_t state_;
};

/// Independent stream for (seed, index). Replicate i of a resampling loop
/// draws from stream_for(seed, i), so the loop parallelizes without changing
/// its result.
inline SplitMix64 stream_for(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 mixer(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
  return SplitMix64(mixer.next());
}

/// Fisher-Yates with an explicit generator.
template <typename T>
void shuffle(std::vector<T>& items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace typelink
