#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace signseg {

// splitmix64, the usual seed scrambler.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from (seed, tag, indices). Streams
// are stateless: the same tuple always yields the same seed, which is
// what makes shuffles, dropout masks and synthetic samples reproducible
// without serializing engine state.
inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag,
                              std::uint64_t a = 0, std::uint64_t b = 0,
                              std::uint64_t c = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char ch : tag) {
    h ^= static_cast<std::uint8_t>(ch);
    h *= 0x100000001b3ULL;
  }
  std::uint64_t s = seed;
  s ^= splitmix64(h);
  s ^= splitmix64(a) + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
  s ^= splitmix64(b) + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
  s ^= splitmix64(c) + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
  std::uint64_t st = s;
  return splitmix64(st);
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::string_view tag,
                                   std::uint64_t a = 0, std::uint64_t b = 0,
                                   std::uint64_t c = 0) {
  return std::mt19937_64(mix_seed(seed, tag, a, b, c));
}

}  // namespace signseg
