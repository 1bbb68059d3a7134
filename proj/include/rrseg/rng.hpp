#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rrseg {

/// SplitMix64 generator.
///
/// Used instead of the <random> distributions because those are allowed to
/// differ between standard library implementations, and every seeded artifact
/// (RANSAC samples, fixtures) has to reproduce bit-for-bit everywhere.
///
/// Mappings, frozen as part of the public contract:
///   next()      standard SplitMix64 step (Steele, Lea, Flood 2014 constants)
///   below(n)    (next() * n) >> 64, 128-bit multiply
///   uniform()   (next() >> 11) * 2^-53, in [0, 1)
///   normal()    Box-Muller on two uniform() draws, cosine branch only
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t below(std::uint64_t n) noexcept {
    __extension__ using u128 = unsigned __int128;  // multiply-shift range reduction
    return static_cast<std::uint64_t>((static_cast<u128>(next()) * n) >> 64);
  }

  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  double normal() noexcept {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

/// Stateless finalizer; combines seeds and indices into an independent stream seed.
constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b) noexcept {
  std::uint64_t z = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace rrseg
