#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace embfair {

// splitmix64 finalizer (Vigna). Used both for seed-stream derivation and for
// the deterministic split hash so results are identical across platforms.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a over UTF-8 bytes.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// All randomness flows from one root seed; each named stream gets an
// independent substream so adding a new consumer does not perturb others.
inline std::mt19937_64 make_rng(std::uint64_t root_seed, std::string_view stream,
                                std::uint64_t counter = 0) {
  std::uint64_t s = mix64(root_seed ^ fnv1a64(stream));
  return std::mt19937_64(mix64(s + counter));
}

// Hash (id, seed) to a uniform real in [0,1). Drives split assignment.
inline double unit_hash(std::string_view id, std::uint64_t seed) {
  std::string bytes(id);
  bytes.push_back('\x1f');
  bytes += std::to_string(seed);
  std::uint64_t h = mix64(fnv1a64(bytes));
  return static_cast<double>(h) / 18446744073709551616.0;  // 2^64
}

}  // namespace embfair
