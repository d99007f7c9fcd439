#pragma once

#include <bit>
#include <cstdint>

// Deterministic random sources.  Everything here is fully specified by the
// seed and the key bits, so results are identical across platforms, thread
// counts, and run order.  std::random distributions are deliberately avoided:
// their output is implementation-defined.

namespace dyadic {

/// One round of the splitmix64 output function.
inline std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Sequential splitmix64 stream.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Fair sign, +1 or -1.
  double sign() { return (next() & 1u) ? 1.0 : -1.0; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

/// Stateless keyed draw: the value depends only on (seed, k0..k3).  Used for
/// per-cube data (kernel tables, cascade factors) so that deepening the model
/// extends a construction instead of reshuffling it.
inline std::uint64_t keyed_bits(std::uint64_t seed, std::uint64_t k0,
                                std::uint64_t k1 = 0, std::uint64_t k2 = 0,
                                std::uint64_t k3 = 0) {
  std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc908ULL);
  h = mix64(h ^ 0x9e3779b97f4a7c15ULL ^ k0);
  h = mix64(h ^ 0xbb67ae8584caa73bULL ^ k1);
  h = mix64(h ^ 0x3c6ef372fe94f82bULL ^ k2);
  h = mix64(h ^ 0xa54ff53a5f1d36f1ULL ^ k3);
  return h;
}

inline double keyed_uniform01(std::uint64_t seed, std::uint64_t k0,
                              std::uint64_t k1 = 0, std::uint64_t k2 = 0,
                              std::uint64_t k3 = 0) {
  return static_cast<double>(keyed_bits(seed, k0, k1, k2, k3) >> 11) * 0x1.0p-53;
}

/// Uniform in (-1, 1).
inline double keyed_symmetric(std::uint64_t seed, std::uint64_t k0,
                              std::uint64_t k1 = 0, std::uint64_t k2 = 0,
                              std::uint64_t k3 = 0) {
  return 2.0 * keyed_uniform01(seed, k0, k1, k2, k3) - 1.0;
}

/// Walsh sign: +1/-1 depending on the parity of popcount(p & index).
/// Distinct nonzero indices give exactly pairwise-orthogonal sign sequences
/// over p = 0..P-1 when P is a power of two larger than every index.
inline double walsh_sign(std::uint64_t p, std::uint64_t index) {
  return (std::popcount(p & index) & 1u) ? -1.0 : 1.0;
}

}  // namespace dyadic
