#pragma once

#include <cstdint>
#include <random>

namespace aot {

using Rng = std::mt19937_64;

/// Named independent random streams of a run.
enum class Stream : std::uint64_t { Topology = 1, Environment = 2, Policy = 3, Replay = 4, Init = 5 };

/// Splits one run seed into reproducible, decorrelated child seeds (splitmix64 finalizer).
constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  std::uint64_t z = seed ^ (static_cast<std::uint64_t>(stream) * 0x9E3779B97F4A7C15ULL) ^ (index * 0xD1B54A32D192ED03ULL);
  for (int round = 0; round < 2; ++round) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
  }
  return z;
}

}  // namespace aot
