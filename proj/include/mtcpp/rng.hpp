#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace mtcpp {

/// The single source of randomness for every sampler in the library.
///
/// Wraps a 64-bit Mersenne twister and derives all variates with explicit,
/// platform-independent transforms so that a seed fixes every output bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [0, n).
  std::size_t below(std::size_t n);

  bool bernoulli(double p) { return uniform() < p; }

  /// Number of failures before the first success; mean `mean`.
  std::int64_t geometric(double mean);

  /// Index drawn proportionally to the (nonnegative) weights.
  std::size_t categorical(std::span<const double> weights);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Stream seed for replicate `replicate` of task `task` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t task,
                          std::uint64_t replicate);

}  // namespace mtcpp
