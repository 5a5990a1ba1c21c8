#pragma once

#include <cstdint>
#include <random>

namespace sivo {

/// Independent random streams, one per purpose, so that adding draws to
/// one subsystem never shifts another.
enum class Stream : std::uint64_t {
  World = 1,
  Motion = 2,
  Pixel = 3,
  Semantics = 4,
  Mislabel = 5,
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Counter-based key for (seed, stream, a, b); equal inputs give equal keys
/// regardless of call order.
std::uint64_t stream_key(std::uint64_t seed, Stream stream, std::uint64_t a = 0,
                         std::uint64_t b = 0);

/// Engine seeded from stream_key.
std::mt19937_64 make_engine(std::uint64_t seed, Stream stream, std::uint64_t a = 0,
                            std::uint64_t b = 0);

}  // namespace sivo
