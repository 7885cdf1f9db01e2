#pragma once

#include <cstdint>

namespace dglhom {

// splitmix64. Used for randomized property tests and the CLI --seed option;
// self-contained so that identical seeds give identical streams on every
// platform.
class Prng {
 public:
  explicit Prng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [lo, hi] (inclusive). hi >= lo.
  long range(long lo, long hi) {
    return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  bool chance(unsigned num, unsigned den) { return next() % den < num; }

 private:
  std::uint64_t state_;
};

}  // namespace dglhom
