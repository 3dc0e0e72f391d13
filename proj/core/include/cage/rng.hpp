#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace cage {

// splitmix64 finalizer, used to derive independent sub-stream seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// mt19937_64 with hand-rolled draw helpers. The standard distributions are
// not bit-reproducible across library implementations, so every draw used
// by the simulator goes through this wrapper.
class Rng {
 public:
  Rng() : engine_(0) {}
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // uniform double in [0, 1), 53 mantissa bits
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // uniform integer in [0, n), n > 0; unbiased via rejection
  std::size_t uniform_int(std::size_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t draw;
    do {
      draw = engine_();
    } while (draw >= limit);
    return static_cast<std::size_t>(draw % n);
  }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform01() < p;
  }

  // uniform double in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[uniform_int(items.size())];
  }

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }
  bool operator!=(const Rng& other) const { return !(*this == other); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cage
