#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace restrl {

// Deterministic random source. All session randomness flows through one
// instance so a seed fully determines the request stream. Distributions are
// hand-rolled on top of mt19937_64 because the std:: ones are
// implementation-defined and would break cross-platform reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1). 53-bit mantissa construction.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform index in [0, n). n must be > 0.
  std::size_t index(std::size_t n) {
    // rejection sampling to avoid modulo bias
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
  }

  // Uniform integer in [lo, hi], inclusive.
  long long int_range(long long lo, long long hi) {
    return lo + static_cast<long long>(
                    index(static_cast<std::size_t>(hi - lo + 1)));
  }

  // Uniform real in [lo, hi).
  double real_range(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool coin() { return (gen_() & 1u) != 0; }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[index(items.size())];
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace restrl
