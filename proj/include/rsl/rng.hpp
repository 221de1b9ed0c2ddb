// rng.hpp - deterministic pseudo-random streams.
// Generator: xoshiro256** with splitmix64 state initialization.  Uniform
// doubles take the top 53 bits; categorical draws invert the CDF in index
// order.  Everything downstream of a seed is reproducible across platforms.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rsl {

inline uint64_t splitmix64_next(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Child seed for a labeled stream, so each experiment cell draws
// independently of execution order.
inline uint64_t derive_seed(uint64_t root, uint64_t stream) {
  uint64_t state = root;
  splitmix64_next(state);
  state ^= 0xd1342543de82ef95ULL * (stream + 1);
  return splitmix64_next(state);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t state = seed;
    for (int i = 0; i < 4; ++i) s_[i] = splitmix64_next(state);
  }

  uint64_t next_u64() {
    auto rotl = [](uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
    uint64_t result = rotl(s_[1] * 5, 7) * 9;
    uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform index in [0, n).
  int below(int n) {
    if (n <= 0) throw std::invalid_argument("below: empty range");
    int i = static_cast<int>(next_double() * n);
    return i < n ? i : n - 1;
  }

  // Index drawn proportionally to weights (nonnegative, positive total),
  // by walking the cumulative sum in index order.
  int categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("categorical: negative weight");
      total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("categorical: zero total weight");
    double u = next_double() * total;
    double acc = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return static_cast<int>(i);
    }
    // Rounding can push u past the last partial sum; fall back to the last
    // positive weight.
    for (size_t i = weights.size(); i-- > 0;)
      if (weights[i] > 0.0) return static_cast<int>(i);
    return static_cast<int>(weights.size()) - 1;
  }

 private:
  uint64_t s_[4];
};

}  // namespace rsl
