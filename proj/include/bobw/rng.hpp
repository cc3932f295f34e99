#pragma once

// Counter-based randomness: every draw is a pure function of its key, so runs
// are bit-identical regardless of the order in which rounds or seeds execute.

#include <cstdint>
#include <string_view>

namespace bobw {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t combine(std::uint64_t key, std::uint64_t value) {
  return mix64(key ^ mix64(value));
}

// FNV-1a, used to fold experiment ids and role names into keys.
constexpr std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

enum class DrawPurpose : std::uint64_t { kExploit = 1, kExplore = 2, kLoss = 3 };

class CounterRng {
 public:
  constexpr CounterRng() = default;
  constexpr explicit CounterRng(std::uint64_t key) : key_(key) {}

  // Key derived from (experiment id, seed, role).
  static constexpr CounterRng derive(std::string_view experiment_id, std::uint64_t seed,
                                     std::string_view role) {
    return CounterRng(combine(combine(hash_string(experiment_id), seed), hash_string(role)));
  }

  constexpr std::uint64_t key() const { return key_; }

  constexpr double uniform(std::uint64_t round, DrawPurpose purpose,
                           std::uint64_t index = 0) const {
    return to_unit(
        combine(combine(combine(key_, round), static_cast<std::uint64_t>(purpose)), index));
  }

 private:
  std::uint64_t key_ = 0;
};

}  // namespace bobw
