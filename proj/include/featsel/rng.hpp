#pragma once

#include <cstdint>
#include <initializer_list>

namespace featsel {

// splitmix64 finalizer; used to derive independent, reproducible seed
// streams so that adding methods or subset sizes never perturbs the draws
// of existing ones.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t seed_mix(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x853c49e6748fea9bULL;
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

// Stream tags keeping scene generation, per-trial selection, and benchmark
// block draws independent of one another.
inline constexpr std::uint64_t kSceneStream = 1;
inline constexpr std::uint64_t kSelectStream = 2;
inline constexpr std::uint64_t kBenchStream = 3;
inline constexpr std::uint64_t kVerifyStream = 4;

}  // namespace featsel
