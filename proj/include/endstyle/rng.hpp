#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace endstyle {

// All randomness in the library flows through mt19937_64 plus the helpers
// below. std::shuffle and std::uniform_*_distribution are implementation
// defined, so using them would break the byte-identical reproducibility
// contract across standard libraries.

// Unbiased draw from [0, n).
inline std::uint64_t bounded(std::mt19937_64& g, std::uint64_t n) {
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = g();
  while (x >= limit) x = g();
  return x % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double u01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Fisher-Yates, deterministic for a given generator state.
template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& g) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[bounded(g, i)]);
  }
}

// k distinct indices from [0, n), in draw order.
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k,
                                               std::mt19937_64& g) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + bounded(g, n - i);
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  return out;
}

}  // namespace endstyle
