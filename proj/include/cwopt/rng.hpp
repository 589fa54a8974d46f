#pragma once

#include <cstdint>
#include <random>

namespace cwopt {

using Rng = std::mt19937_64;

// Stream identifiers for substreams derived from one master seed.
enum class Stream : std::uint64_t {
  Graph = 1,
  InitialCondition = 2,
  Topology = 3,
  Probe = 4,
  Oracle = 5,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic substream for (seed, stream, index). Independent of how work
/// is partitioned across workers.
inline Rng derive_stream(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  h = splitmix64(h ^ index);
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return Rng(seq);
}

inline double uniform01(Rng& rng) {
  // 53 random bits into [0,1).
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace cwopt
