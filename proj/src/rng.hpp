#pragma once

#include <cmath>
#include <cstdint>

namespace ridepool {

// xoshiro256** seeded via splitmix64. Self-contained so that seeded runs are
// reproducible across standard libraries and platforms.
class Rng {
public:
  explicit Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unbiased integer in [0, n), n > 0.
  uint64_t uniform_index(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // Exact Poisson draw (product of uniforms); large means are split so the
  // threshold exp(-mean) never underflows.
  long long poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean > 30.0) {
      const double half = mean / 2.0;
      return poisson(half) + poisson(mean - half);
    }
    const double threshold = std::exp(-mean);
    long long count = 0;
    double product = uniform01();
    while (product >= threshold) {
      ++count;
      product *= uniform01();
    }
    return count;
  }

  // Derive an independent deterministic substream.
  Rng substream(uint64_t tag) const {
    uint64_t x = state_[0] ^ (tag * 0x9e3779b97f4a7c15ull);
    return Rng(splitmix64(x));
  }

private:
  static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

  static uint64_t splitmix64(uint64_t& x) {
    uint64_t z = (x += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  uint64_t state_[4];
};

}  // namespace ridepool
