#pragma once

#include <cstdint>
#include <random>

#include "tsn5g/time.hpp"

namespace tsn5g {

/// splitmix64 finalizer; used to derive independent seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// mt19937_64 with distribution code written out here, so draws do not
/// depend on the standard library's distribution implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(mix_seed(seed)) {}

  std::uint64_t next() { return eng_(); }

  /// Uniform on the open interval (0, 1).
  double uniform_open() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<UInt128>(eng_()) * n) >> 64);
  }

private:
  std::mt19937_64 eng_;
};

}  // namespace tsn5g
