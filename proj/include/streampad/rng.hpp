#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace streampad {

/// Deterministic random source. All randomness in the project flows through
/// this class so that a fixed seed yields bit-identical output on every
/// platform; the standard <random> distributions are implementation-defined
/// and therefore avoided.
///
/// The core generator is splitmix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double next_real() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). Unbiased via rejection sampling. n > 0.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t reject_below = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x >= reject_below) return x % n;
    }
  }

  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    next_below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// k distinct indices from [0, n), in draw order (partial Fisher-Yates).
  std::vector<int> sample_indices(int n, int k);

 private:
  std::uint64_t state_;
};

inline std::vector<int> Rng::sample_indices(int n, int k) {
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  if (k > n) k = n;
  std::vector<int> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(next_below(n - i));
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  return out;
}

/// FNV-1a, used for stable name hashing and file checksums.
inline std::uint64_t fnv1a(std::string_view s,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Derives an independent sub-seed for a named component, so that one root
/// seed drives the whole pipeline without coupling the components' streams.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view component,
                                 std::uint64_t salt = 0) {
  Rng mix(root ^ fnv1a(component) ^ (salt * 0x9e3779b97f4a7c15ULL));
  return mix.next_u64();
}

}  // namespace streampad
