#include "skillroute/money.hpp"

#include <cmath>
#include <cstdlib>
#include <fmt/format.h>

#include "skillroute/error.hpp"

namespace skillroute {

std::int64_t divide_half_even(__int128 numerator, std::int64_t denominator) {
  if (denominator <= 0) throw Error(ErrorKind::domain, "non-positive divisor in money arithmetic");
  bool negative = numerator < 0;
  __int128 n = negative ? -numerator : numerator;
  __int128 q = n / denominator;
  __int128 r = n % denominator;
  __int128 twice = 2 * r;
  if (twice > denominator || (twice == denominator && (q % 2) == 1)) ++q;
  return static_cast<std::int64_t>(negative ? -q : q);
}

Money Money::from_usd(double usd) {
  if (!std::isfinite(usd)) throw Error(ErrorKind::domain, "non-finite money amount");
  // nearbyint honours the default round-to-nearest-even mode.
  return Money(static_cast<std::int64_t>(std::nearbyint(usd * 1e6)));
}

std::int64_t Money::cents_ceil() const {
  std::int64_t q = micros_ / 10'000;
  if (micros_ % 10'000 > 0) ++q;
  return q;
}

std::int64_t Money::cents_floor() const {
  std::int64_t q = micros_ / 10'000;
  if (micros_ % 10'000 < 0) --q;
  return q;
}

std::int64_t Money::cents_half_even() const { return divide_half_even(micros_, 10'000); }

std::string Money::to_display() const {
  std::int64_t cents = cents_half_even();
  std::int64_t abs_cents = std::llabs(cents);
  return fmt::format("{}${}.{:02}", cents < 0 ? "-" : "", abs_cents / 100, abs_cents % 100);
}

std::string Money::to_decimal() const {
  std::int64_t abs_micros = std::llabs(micros_);
  return fmt::format("{}{}.{:06}", micros_ < 0 ? "-" : "", abs_micros / 1'000'000,
                     abs_micros % 1'000'000);
}

}  // namespace skillroute
