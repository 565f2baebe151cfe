#include "skillroute/cost.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "skillroute/error.hpp"

namespace skillroute {

namespace {

__int128 price_micros(double usd_per_mtok) {
  if (!(usd_per_mtok >= 0.0) || !std::isfinite(usd_per_mtok))
    throw Error(ErrorKind::domain, fmt::format("invalid price {}", usd_per_mtok));
  return static_cast<__int128>(std::nearbyint(usd_per_mtok * 1e6));
}

}  // namespace

Money cost_abs(const ModelRecord& model, std::int64_t tokens_in, std::int64_t tokens_out, std::int64_t runs) {
  if (tokens_in < 0 || tokens_out < 0)
    throw Error(ErrorKind::domain, "token counts must be nonnegative");
  if (runs < 1) throw Error(ErrorKind::domain, "runs must be at least 1");
  // price micros per Mtok * tokens = 1e-12 USD units; divide by 1e6 for micros.
  const __int128 numerator =
      static_cast<__int128>(runs) *
      (static_cast<__int128>(tokens_in) * price_micros(model.price_in) +
       static_cast<__int128>(tokens_out) * price_micros(model.price_out));
  return Money::from_micros(divide_half_even(numerator, 1'000'000));
}

double skew(std::int64_t tokens_in, std::int64_t tokens_out) {
  if (tokens_in < 0 || tokens_out < 0) throw Error(ErrorKind::domain, "token counts must be nonnegative");
  if (tokens_in + tokens_out == 0) throw Error(ErrorKind::domain, "skew undefined when both token counts are zero");
  return static_cast<double>(tokens_in) / static_cast<double>(tokens_in + tokens_out);
}

double cost_rel(const ModelRecord& model, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorKind::domain, fmt::format("skew {} outside [0, 1]", s));
  return s * model.price_in + (1.0 - s) * model.price_out;
}

std::map<std::string, double> cost_penalty(std::span<const ModelRecord> models, double s) {
  if (models.empty()) throw Error(ErrorKind::domain, "cost penalty needs at least one model");
  std::map<std::string, double> rates;
  for (const auto& m : models) rates[m.name] = cost_rel(m, s);
  auto [lo, hi] = std::minmax_element(rates.begin(), rates.end(),
                                      [](const auto& a, const auto& b) { return a.second < b.second; });
  const double min_rate = lo->second;
  const double range = hi->second - min_rate;
  std::map<std::string, double> out;
  for (const auto& [name, rate] : rates) out[name] = range > 0.0 ? (rate - min_rate) / range : 0.0;
  return out;
}

std::map<std::string, CostQuote> quote_all(std::span<const ModelRecord> models, std::int64_t tokens_in,
                                           std::int64_t tokens_out, std::int64_t runs) {
  const double s = skew(tokens_in, tokens_out);
  auto penalties = cost_penalty(models, s);
  std::map<std::string, CostQuote> out;
  for (const auto& m : models) {
    out[m.name] = CostQuote{m.name, cost_abs(m, tokens_in, tokens_out, runs), cost_rel(m, s), penalties[m.name]};
  }
  return out;
}

}  // namespace skillroute
