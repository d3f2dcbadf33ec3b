#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace amr {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; the mixing step behind every derived seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s,
                                std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Seed splitting: every random stream in the program is
// derive_seed(root, label[, index...]) so a single --seed fixes everything.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view label) noexcept {
  return splitmix64(root ^ splitmix64(fnv1a64(label)));
}

constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) noexcept {
  return splitmix64(root ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

}  // namespace amr
