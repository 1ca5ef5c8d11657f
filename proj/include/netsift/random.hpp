#pragma once

#include <cstdint>
#include <random>

namespace netsift {

// Stream labels keeping independent RNG substreams from colliding when they
// are derived from one run seed.
enum class RngStream : std::uint64_t {
  null_sample = 1,
  kmeans = 2,
  louvain = 3,
  multiway = 4,
  sweep = 5,
  permutation = 6,
  synthetic = 7,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for the substream (seed, stream, index). Pure, so samples drawn from
/// substreams are reproducible under any evaluation order or thread count.
inline std::uint64_t substream_seed(std::uint64_t seed, RngStream stream,
                                    std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(seed) ^
                               static_cast<std::uint64_t>(stream)) ^
                    index);
}

inline std::mt19937_64 substream_engine(std::uint64_t seed, RngStream stream,
                                        std::uint64_t index) {
  return std::mt19937_64(substream_seed(seed, stream, index));
}

}  // namespace netsift
