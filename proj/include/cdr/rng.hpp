#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace cdr {

/// Deterministic random streams. Every consumer derives its own generator from
/// the run seed plus a list of integer tags, e.g. stream(seed, {kFixer, level,
/// restart}). The derivation is splitmix64 folded over the tags, so two streams
/// with distinct tag lists are decorrelated and reproducible across platforms.
namespace rng {

inline constexpr std::uint64_t kInstance = 1;
inline constexpr std::uint64_t kFixer = 2;
inline constexpr std::uint64_t kLowerBound = 3;
inline constexpr std::uint64_t kAssignment = 4;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(seed);
  for (auto t : tags) h = splitmix64(h ^ splitmix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

using Engine = std::mt19937_64;

inline Engine stream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  return Engine(derive(seed, tags));
}

/// Uniform integer in [lo, hi] by rejection sampling. Unlike
/// std::uniform_int_distribution the output sequence is fixed by the engine
/// alone, which keeps schedules byte-identical across standard libraries.
inline std::int64_t uniform(Engine& g, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(g());
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % span);
  std::uint64_t v;
  do {
    v = g();
  } while (v >= limit);
  return lo + static_cast<std::int64_t>(v % span);
}

}  // namespace rng
}  // namespace cdr
