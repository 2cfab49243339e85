#pragma once

#include <cstdint>
#include <random>

namespace nlsgas {

// splitmix64 step; used to derive well-separated per-trial seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Per-trial seed: hash(base_seed, N, trial). Independent of execution order.
inline std::uint64_t trial_seed(std::uint64_t base, std::uint64_t n, std::uint64_t trial) {
  return splitmix64(splitmix64(splitmix64(base) ^ n) ^ trial);
}

// mt19937_64 wrapper producing doubles in [0,1) from the raw 64-bit stream.
// The mapping is fixed here (not via uniform_real_distribution) so that the
// sequence is bit-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace nlsgas
