#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

namespace bias_audit {

// SplitMix64, after Vigna's public domain splitmix64.c.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

 private:
  std::uint64_t state_;
};

/// Uniform integer in [0, bound) by multiply-shift with rejection (Lemire).
/// `bound` must be non-zero.
template <typename Rng>
std::uint64_t bounded_uniform(Rng& rng, std::uint64_t bound) {
  using u128 = unsigned __int128;
  u128 m = static_cast<u128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Picks `k` of the indices 0..n-1, returned ascending.
///
/// The selection is pinned algorithmically so that any implementation
/// reproduces it: SplitMix64 seeded with `seed`; Fisher-Yates over the
/// identity permutation walking i = n-1 down to 1, swapping slot i with
/// bounded_uniform(i + 1); the first k slots are kept and sorted.
/// Requires k <= n.
inline std::vector<std::uint64_t> sample_indices(std::uint64_t n, std::uint64_t k,
                                                 std::uint64_t seed) {
  std::vector<std::uint64_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::uint64_t{0});
  SplitMix64 rng(seed);
  for (std::uint64_t i = n; i-- > 1;) {
    std::swap(idx[i], idx[bounded_uniform(rng, i + 1)]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace bias_audit
