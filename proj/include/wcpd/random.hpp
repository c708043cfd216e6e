#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace wcpd {

/// xoshiro256** seeded through splitmix64. Every draw used by the library
/// goes through this generator so runs are reproducible across platforms
/// and standard-library implementations.
class Rng
{
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed)
  {
    std::uint64_t s = seed;
    for (auto &word : state_) { word = splitmix64(s); }
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()()
  {
    auto const result = rotl(state_[1] * 5, 7) * 9;
    auto const t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n)
  {
    auto const limit = max() - max() % n;
    result_type r;
    do { r = (*this)(); } while (r >= limit);
    return r % n;
  }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal()
  {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) { u1 = uniform(); }
    double const u2 = uniform();
    double const r = std::sqrt(-2.0 * std::log(u1));
    double const phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

private:
  static std::uint64_t splitmix64(std::uint64_t &x)
  {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4]{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace wcpd
