#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>

namespace dcosp {

using Rng = std::mt19937_64;

// Fixed offsets for the independent streams derived from one seed.
enum class Stream : std::uint32_t {
  kMain = 0,
  kTargets = 1,
  kPeriodicity = 2,
  kTasks = 3,
  kDynamics = 4,
  kHorizon = 5,
};

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

inline Rng make_rng(std::uint64_t seed, Stream stream) {
  return make_rng(seed, static_cast<std::uint64_t>(stream));
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  std::shuffle(items.begin(), items.end(), rng);
}

}  // namespace dcosp
