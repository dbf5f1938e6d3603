#ifndef LPME_RNG_HPP
#define LPME_RNG_HPP

#include <cmath>
#include <cstdint>

namespace lpme {

namespace detail {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-free splittable stream: the output sequence is a pure function of
/// (seed, stream_id).  Each worker owns its streams; streams with distinct
/// ids are statistically independent.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : state_(detail::mix64(detail::mix64(seed) ^
                             detail::mix64(stream_id ^ 0x632be59bd9b4e019ULL))),
        seed_(seed),
        stream_id_(stream_id) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1), 53 bits.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on the open interval (0, 1); safe under log().
  double uniform_open() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Fair sign flip.
  int rademacher() noexcept { return (next_u64() >> 63) ? 1 : -1; }

  /// Uniform integer in {0, ..., n-1} by rejection.
  std::uint64_t uniform_below(std::uint64_t n) noexcept {
    const std::uint64_t limit = ~0ULL - (~0ULL % n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  /// Laplace(rate) sample with density (rate/2) exp(-rate |w|), drawn by the
  /// inverse-CDF transform from one uniform.
  double laplace(double rate) noexcept {
    const double u = uniform_open() - 0.5;  // (-1/2, 1/2)
    const double s = u < 0.0 ? -1.0 : 1.0;
    return -s * std::log(1.0 - 2.0 * std::fabs(u)) / rate;
  }

 private:
  std::uint64_t state_;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
};

/// Stable stream-id derivation for (cell, trial) fan-out.  Each argument is
/// absorbed into an already-mixed state, so the result depends on argument
/// order (a plain xor of mixed inputs would make the first two commute).
inline std::uint64_t derive_stream_id(std::uint64_t a, std::uint64_t b,
                                      std::uint64_t c = 0,
                                      std::uint64_t d = 0) noexcept {
  std::uint64_t h = 0x27d4eb2f165667c5ULL;
  h = detail::mix64(h ^ detail::mix64(a));
  h = detail::mix64(h ^ detail::mix64(b));
  h = detail::mix64(h ^ detail::mix64(c));
  h = detail::mix64(h ^ detail::mix64(d));
  return h;
}

}  // namespace lpme

#endif  // LPME_RNG_HPP
