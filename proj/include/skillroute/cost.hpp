#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "skillroute/models.hpp"
#include "skillroute/money.hpp"

namespace skillroute {

/// runs * (tokens_in * price_in + tokens_out * price_out) / 1e6, computed in
/// integer micro-dollars and rounded half-even at the sixth decimal.
Money cost_abs(const ModelRecord& model, std::int64_t tokens_in, std::int64_t tokens_out, std::int64_t runs = 1);

/// Fraction of a task's tokens that are input.
double skew(std::int64_t tokens_in, std::int64_t tokens_out);

/// Blended USD-per-million-token rate at the given input/output skew.
double cost_rel(const ModelRecord& model, double skew);

/// Min-max normalized relative rate across the model set: cheapest 0, most
/// expensive 1. When every rate is equal there is no cost signal and every
/// penalty is 0.
std::map<std::string, double> cost_penalty(std::span<const ModelRecord> models, double skew);

struct CostQuote {
  std::string model;
  Money absolute;
  double rate_per_mtok = 0.0;
  double penalty = 0.0;
};

std::map<std::string, CostQuote> quote_all(std::span<const ModelRecord> models, std::int64_t tokens_in,
                                           std::int64_t tokens_out, std::int64_t runs);

}  // namespace skillroute
