#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace skillroute {

/// Exact USD amount held in integer micro-dollars (six fractional digits).
class Money {
 public:
  constexpr Money() = default;

  static constexpr Money from_micros(std::int64_t micros) { return Money(micros); }
  static constexpr Money from_cents(std::int64_t cents) { return Money(cents * 10'000); }
  /// Rounds half-to-even at the sixth fractional digit.
  static Money from_usd(double usd);

  constexpr std::int64_t micros() const { return micros_; }
  double usd() const { return static_cast<double>(micros_) / 1e6; }

  /// Smallest whole number of cents that is >= this amount.
  std::int64_t cents_ceil() const;
  /// Largest whole number of cents that is <= this amount.
  std::int64_t cents_floor() const;
  /// Nearest cent, ties to even.
  std::int64_t cents_half_even() const;

  /// "$22.50" style rendering rounded half-even to cents.
  std::string to_display() const;
  /// Full six-digit decimal, e.g. "0.064000".
  std::string to_decimal() const;

  constexpr Money operator+(Money o) const { return Money(micros_ + o.micros_); }
  constexpr Money operator-(Money o) const { return Money(micros_ - o.micros_); }
  constexpr Money& operator+=(Money o) {
    micros_ += o.micros_;
    return *this;
  }
  constexpr auto operator<=>(const Money&) const = default;

 private:
  constexpr explicit Money(std::int64_t micros) : micros_(micros) {}
  std::int64_t micros_ = 0;
};

/// Divides a non-negative 128-bit numerator, rounding half to even.
std::int64_t divide_half_even(__int128 numerator, std::int64_t denominator);

}  // namespace skillroute
