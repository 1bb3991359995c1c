#include "mtcpp/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mtcpp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

std::size_t Rng::below(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: empty range");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return static_cast<std::size_t>(x % bound);
}

std::int64_t Rng::geometric(double mean) {
  if (!(mean > 0.0)) return 0;
  // P(G >= j) = (mean / (1 + mean))^j
  const double log_ratio = std::log(mean) - std::log1p(mean);
  const double u = uniform();
  return static_cast<std::int64_t>(std::floor(std::log1p(-u) / log_ratio));
}

std::size_t Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw std::invalid_argument("Rng::categorical: zero total weight");
  double target = uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    target -= weights[i];
    if (target < 0.0) return i;
  }
  // Round-off can leave target marginally nonnegative; return the last
  // index with positive weight.
  for (std::size_t i = weights.size(); i > 0; --i) {
    if (weights[i - 1] > 0.0) return i - 1;
  }
  return weights.size() - 1;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t task,
                          std::uint64_t replicate) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ (task * 0xd6e8feb86659fd93ULL));
  h = splitmix64(h ^ (replicate + 0x632be59bd9b4e019ULL));
  return h;
}

}  // namespace mtcpp
