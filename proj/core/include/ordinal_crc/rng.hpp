#pragma once
//
// Deterministic random primitives. mt19937_64 plus hand-rolled uniform,
// normal and shuffle transforms, so that identical seeds reproduce identical
// streams bit-for-bit on every platform (std::normal_distribution and
// std::shuffle are implementation-defined and would not).

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace ordinal_crc {

class Rng {
 public:
  /// Independent stream (seed, stream_id); std::seed_seq expansion is fully
  /// specified by the standard.
  Rng(uint64_t seed, uint64_t stream_id) {
    std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                      static_cast<uint32_t>(stream_id), static_cast<uint32_t>(stream_id >> 32)};
    engine_.seed(seq);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, bound) via rejection sampling (unbiased).
  uint64_t below(uint64_t bound) {
    const uint64_t limit = std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % bound;
    uint64_t draw;
    do {
      draw = engine_();
    } while (draw >= limit);
    return draw % bound;
  }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ordinal_crc
