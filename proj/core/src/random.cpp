#include "sivo/random.hpp"

namespace sivo {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, Stream stream, std::uint64_t a,
                         std::uint64_t b) {
  std::uint64_t k = mix64(seed);
  k = mix64(k ^ static_cast<std::uint64_t>(stream));
  k = mix64(k ^ a);
  return mix64(k ^ (b * 0xd1b54a32d192ed03ULL));
}

std::mt19937_64 make_engine(std::uint64_t seed, Stream stream, std::uint64_t a,
                            std::uint64_t b) {
  return std::mt19937_64(stream_key(seed, stream, a, b));
}

}  // namespace sivo
