#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace asymhash {

using Rng = std::mt19937_64;

// Independent sub-stream for a named purpose ("data", "init", "sgd", ...).
// Every random draw in the library goes through one of these so that two
// trainers sharing a seed see the same data but independent trainer noise.
inline std::uint64_t substream_seed(std::uint64_t seed, std::string_view name) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (h | 1);  // splitmix64 finalizer
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::string_view name) {
  return Rng(substream_seed(seed, name));
}

}  // namespace asymhash
