#pragma once

#include <cmath>
#include <cstdint>

namespace rmt {

// Splittable counter-free RNG: every (seed, stream) pair yields an
// independent, reproducible stream. xoshiro256++ core, keyed through
// splitmix64 so that nearby seeds do not produce correlated states.
// Distribution transforms are implemented here (not via <random>
// distributions) so that output is bit-identical across toolchains.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  Xoshiro256pp() : Xoshiro256pp(0, 0) {}

  // stream = replicate index (or any sub-stream label). The mixing of
  // seed and stream through splitmix64 is the "hash(seed, replicate)"
  // contract: distinct pairs give unrelated states.
  Xoshiro256pp(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t sm = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type(0); }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on (0,1); never returns 0, so log() is safe.
  double uniform01() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second value of each pair is
  // cached, so draws come in a fixed deterministic order.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace rmt
