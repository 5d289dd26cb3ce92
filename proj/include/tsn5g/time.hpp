#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>

namespace tsn5g {

// Wide intermediates for exact rate and time products.
__extension__ typedef __int128 Int128;
__extension__ typedef unsigned __int128 UInt128;

/// Integer nanoseconds. The only time representation used by the library.
class TimeNs {
public:
  constexpr TimeNs() = default;
  constexpr explicit TimeNs(std::int64_t ns) : ns_(ns) {}

  [[nodiscard]] constexpr std::int64_t count() const { return ns_; }

  static constexpr TimeNs zero() { return TimeNs{0}; }
  static constexpr TimeNs max() { return TimeNs{std::numeric_limits<std::int64_t>::max()}; }

  constexpr auto operator<=>(const TimeNs&) const = default;

  constexpr TimeNs& operator+=(TimeNs o) { ns_ += o.ns_; return *this; }
  constexpr TimeNs& operator-=(TimeNs o) { ns_ -= o.ns_; return *this; }

  friend constexpr TimeNs operator+(TimeNs a, TimeNs b) { return TimeNs{a.ns_ + b.ns_}; }
  friend constexpr TimeNs operator-(TimeNs a, TimeNs b) { return TimeNs{a.ns_ - b.ns_}; }
  friend constexpr TimeNs operator-(TimeNs a) { return TimeNs{-a.ns_}; }
  friend constexpr TimeNs operator*(TimeNs a, std::int64_t k) { return TimeNs{a.ns_ * k}; }
  friend constexpr TimeNs operator*(std::int64_t k, TimeNs a) { return TimeNs{a.ns_ * k}; }
  friend constexpr std::int64_t operator/(TimeNs a, TimeNs b) { return a.ns_ / b.ns_; }
  friend constexpr TimeNs operator/(TimeNs a, std::int64_t k) { return TimeNs{a.ns_ / k}; }

  friend std::ostream& operator<<(std::ostream& os, TimeNs t) { return os << t.ns_ << "ns"; }

private:
  std::int64_t ns_ = 0;
};

inline namespace literals {
constexpr TimeNs operator""_ns(unsigned long long v) { return TimeNs{static_cast<std::int64_t>(v)}; }
constexpr TimeNs operator""_us(unsigned long long v) { return TimeNs{static_cast<std::int64_t>(v) * 1000}; }
constexpr TimeNs operator""_ms(unsigned long long v) { return TimeNs{static_cast<std::int64_t>(v) * 1000000}; }
constexpr TimeNs operator""_s(unsigned long long v) { return TimeNs{static_cast<std::int64_t>(v) * 1000000000}; }
}  // namespace literals

/// Floor division / modulo: the result of floor_mod is always in [0, d).
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t d) {
  std::int64_t q = a / d;
  if ((a % d != 0) && ((a < 0) != (d < 0))) --q;
  return q;
}
constexpr std::int64_t floor_mod(std::int64_t a, std::int64_t d) { return a - floor_div(a, d) * d; }
constexpr TimeNs floor_mod(TimeNs a, TimeNs d) { return TimeNs{floor_mod(a.count(), d.count())}; }

/// Duration of one TAS clock tick. Gate events happen on multiples of it.
struct Macrotick {
  TimeNs m{16};

  constexpr bool divides(TimeNs t) const { return floor_mod(t.count(), m.count()) == 0; }
  constexpr auto operator<=>(const Macrotick&) const = default;
};

/// Smallest multiple of the macrotick that is >= t.
constexpr TimeNs quantize_up(TimeNs t, Macrotick mt) {
  const std::int64_t m = mt.m.count();
  return TimeNs{-floor_div(-t.count(), m) * m};
}

}  // namespace tsn5g
