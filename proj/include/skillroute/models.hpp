#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skillroute/json_io.hpp"
#include "skillroute/skills.hpp"

namespace skillroute {

/// Prices are USD per million tokens.
struct ModelRecord {
  std::string name;
  double price_in = 0.0;
  double price_out = 0.0;
};

struct BenchmarkRecord {
  std::string name;
  std::string description;
  std::optional<SkillVector> skill_weights;  // absent until profiled
  std::optional<double> max_score;           // published maximum, when known
  std::map<std::string, double> scores;      // model name -> raw score
  std::vector<std::string> example_items;    // optional profiler samples
};

/// Per-skill capability. `calibrated` is always kappa * raw, entrywise.
struct CapabilityProfile {
  std::string model;
  std::map<std::string, double> raw;
  std::map<std::string, double> calibrated;
  double kappa = 1.0;
};

inline constexpr double kDefaultKappa = 0.2;

std::vector<ModelRecord> load_models(const std::filesystem::path& path);
std::vector<ModelRecord> parse_models(const Json& doc);
Json to_json(std::span<const ModelRecord> models);

std::vector<BenchmarkRecord> load_benchmarks(const std::filesystem::path& path, const Taxonomy& taxonomy);
std::vector<BenchmarkRecord> parse_benchmarks(const Json& doc, const Taxonomy& taxonomy);
Json to_json(std::span<const BenchmarkRecord> benchmarks);

/// Maximum used for 0-max normalization: the published value when present,
/// otherwise the best local score. Appends a warning when the two disagree.
double effective_max_score(const BenchmarkRecord& bench, std::vector<std::string>* warnings = nullptr);

/// raw / max for every scored model. Throws a domain error when max <= 0 and a
/// validation error when a score exceeds the maximum.
std::map<std::string, double> normalize_scores(const BenchmarkRecord& bench,
                                               std::vector<std::string>* warnings = nullptr);

struct CapabilityReport {
  std::vector<CapabilityProfile> profiles;  // raw only (kappa = 1)
  std::vector<std::string> warnings;
};

/// Weighted average of normalized benchmark scores per skill. A model without
/// a score on a benchmark drops that benchmark from both sums for that model only.
/// Throws when a taxonomy skill has no benchmark weight at all, when a benchmark
/// is unprofiled or has no scores.
CapabilityReport compute_capabilities(std::span<const BenchmarkRecord> benchmarks,
                                      std::span<const ModelRecord> models, const Taxonomy& taxonomy);

/// kappa must lie in (0, 1]; raw is kept.
CapabilityProfile calibrate(CapabilityProfile profile, double kappa);

struct ProfileSet {
  double kappa = kDefaultKappa;
  std::vector<CapabilityProfile> profiles;

  const CapabilityProfile* find(const std::string& model) const;
};

/// Loads raw capabilities and recalibrates them with `kappa` (the file's kappa when unset).
ProfileSet load_profiles(const std::filesystem::path& path, const Taxonomy& taxonomy,
                         std::optional<double> kappa = std::nullopt);
ProfileSet parse_profiles(const Json& doc, const Taxonomy& taxonomy, std::optional<double> kappa = std::nullopt);
Json to_json(const ProfileSet& set);

void check_kappa(double kappa);

}  // namespace skillroute
