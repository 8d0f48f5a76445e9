#pragma once

#include <cstdint>
#include <random>

namespace tollnet {

/// SplitMix64 finalizer; used to derive decorrelated stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of stream `index` derived from a top-level seed.
constexpr std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(splitmix64(base) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// 64-bit Mersenne Twister with portable uniform draws (the standard
/// distributions are implementation-defined, this is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi]; returns lo exactly when the interval is degenerate.
  double uniform(double lo, double hi) {
    if (!(hi > lo)) return lo;
    return lo + (hi - lo) * uniform();
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tollnet
