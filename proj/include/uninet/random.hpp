#ifndef UNINET_RANDOM_HPP_
#define UNINET_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace uninet {

/// Seeded generator with portable uniform draws and shuffles.
///
/// std::uniform_real_distribution and std::shuffle are implementation
/// defined, so trajectories would differ between standard libraries; the
/// engine itself (mt19937_64) is fully specified.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection sampling keeps the draw unbiased.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace uninet

#endif  // UNINET_RANDOM_HPP_
