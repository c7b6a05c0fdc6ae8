#pragma once

#include <cstdint>
#include <random>

namespace othpo {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream salts so scheduler and benchmark-noise streams never collide.
enum class Stream : std::uint64_t {
  kScheduler = 0x5c4ed01e5ULL,
  kNoise = 0x9015e5ULL,
  kBenchmark = 0xbe9c4ULL,
};

// seed' = mix(mix(mix(mix(seed) ^ task) ^ iteration) ^ salt).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t task,
                                    std::uint64_t iteration,
                                    Stream stream) noexcept {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ task);
  h = mix64(h ^ iteration);
  return mix64(h ^ static_cast<std::uint64_t>(stream));
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace othpo
