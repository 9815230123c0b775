#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace omnimatch {

namespace detail {

// splitmix64 finalizer; the standard way to turn correlated keys into
// well-separated engine seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

// Seeded generator with hierarchical stream derivation: child(tag) yields an
// independent stream for the same master seed, so replicate r of experiment e
// can draw from rng.child(e).child(r) and produce identical values whether
// replicates run serially or concurrently.
//
// All primitive draws are implemented directly on the 64-bit engine output
// (not via std:: distributions) so that a given seed produces the same
// numbers on any platform this builds on.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(seed), engine_(detail::mix64(seed)) {}

  Rng child(std::uint64_t tag) const {
    return Rng(detail::mix64(key_ ^ detail::mix64(tag)));
  }

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1): 53-bit mantissa, strictly below 1.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n): unbiased via rejection.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: n must be > 0");
    const std::uint64_t threshold = -n % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = next();
      if (x >= threshold) return x % n;
    }
  }

  // Exp(1); finite because uniform01() < 1.
  double exponential() { return -std::log1p(-uniform01()); }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
};

// Fisher-Yates permutation of {0..n-1}.
inline std::vector<int> shuffled_indices(int n, Rng& rng) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(
        rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  return idx;
}

}  // namespace omnimatch
