#pragma once

#include <cstdint>
#include <random>

namespace patricia {

// All randomness flows through this facade over std::mt19937_64.  The engine's
// output sequence is pinned by the standard, and every derived draw below is
// implemented with integer arithmetic only, so runs are bit-reproducible
// across platforms and standard libraries.  (std::uniform_int_distribution et
// al. are deliberately avoided: their mapping is implementation-defined.)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t u64() { return gen_(); }

  // Uniform draw from {0, ..., n-1}, unbiased via rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t cut = (0 - n) % n;  // 2^64 mod n
    std::uint64_t x = u64();
    while (x < cut) x = u64();
    return x % n;
  }

  // One fair bit.
  int bit() { return static_cast<int>(u64() >> 63); }

  // Uniform in [0,1) with 53 random bits.
  double unit() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

  // True with probability threshold / 2^64.
  bool chance(std::uint64_t threshold) { return u64() < threshold; }

 private:
  std::mt19937_64 gen_;
};

namespace detail {
inline std::uint64_t split_mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

// splitmix64: fixed published algorithm, 8 bytes of state.  Used for word
// streams, which exist by the ten-thousands; the helpers mirror Rng's.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : s_(seed) {}
  std::uint64_t u64() {
    s_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t x = s_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }
  int bit() { return static_cast<int>(u64() >> 63); }
  bool chance(std::uint64_t threshold) { return u64() < threshold; }

 private:
  std::uint64_t s_;
};

// Derives an independent-looking stream seed from a base seed and an index.
// Used everywhere a run needs several generators (one per trial, per word
// stream, ...) so results stay reproducible under any evaluation order.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  return detail::split_mix(base ^ detail::split_mix(index + 1));
}

// Seed used by the CLI and the demos when none is given.
inline constexpr std::uint64_t kDefaultSeed = 1729;

}  // namespace patricia
