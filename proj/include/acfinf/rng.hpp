#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace acfinf {

// Reproducible random streams.
//
// Every stream is a std::mt19937_64 engine (its output sequence is fixed by
// the C++ standard) seeded with a 64-bit value. Independent substreams are
// obtained with derive_seed(seed, index), which runs the SplitMix64
// finalizer over the seed combined with the index. Work that is split over
// threads always asks for the substream of the *work item* (replicate
// index), never of the worker, so results do not depend on scheduling.
//
// Standard normals use the Box-Muller transform on open-interval uniforms
// u = (k + 0.5) / 2^53, k the top 53 bits of one engine draw. Each pair of
// uniforms yields two normals (cosine branch first, then sine branch).

inline constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) by rejection on the top of the 64-bit range.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % bound;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline RandomStream make_stream(std::uint64_t seed, std::uint64_t index) {
  return RandomStream(derive_seed(seed, index));
}

}  // namespace acfinf
