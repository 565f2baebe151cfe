#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "skillroute/json_io.hpp"

namespace skillroute {

struct Skill {
  std::string id;
  std::string description;
};

/// Fixed, ordered skill space shared by benchmarks, models and subtasks.
class Taxonomy {
 public:
  Taxonomy() = default;
  /// Throws a validation error on duplicate ids or empty fields.
  explicit Taxonomy(std::vector<Skill> skills);

  /// The eight-skill default taxonomy.
  static const Taxonomy& canonical();

  const std::vector<Skill>& skills() const { return skills_; }
  std::vector<std::string> ids() const;
  bool contains(const std::string& id) const;
  std::size_t size() const { return skills_.size(); }

  /// "- id: description" lines, the form handed to the profiling prompts.
  std::string definitions_block() const;

 private:
  std::vector<Skill> skills_;
};

Taxonomy load_taxonomy(const std::filesystem::path& path);
Taxonomy parse_taxonomy(const Json& doc);
Json to_json(const Taxonomy& taxonomy);

/// Sparse nonnegative weights keyed by skill id. Absent keys weigh zero;
/// explicit zeros are kept so they round-trip.
class SkillVector {
 public:
  using Weights = std::map<std::string, double>;

  SkillVector() = default;
  explicit SkillVector(Weights weights) : weights_(std::move(weights)) {}
  SkillVector(std::initializer_list<Weights::value_type> init) : weights_(init) {}

  const Weights& weights() const { return weights_; }
  double weight(const std::string& skill) const;
  double sum() const;
  /// Skills with strictly positive weight.
  std::set<std::string> support() const;
  bool empty() const { return weights_.empty(); }

  bool operator==(const SkillVector&) const = default;

 private:
  Weights weights_;
};

/// L1 normalization. A vector whose sum is already within 1e-12 of one is
/// returned unchanged, which makes the operation exactly idempotent.
/// Throws a domain error for all-zero vectors and for negative or non-finite weights.
SkillVector normalize(const SkillVector& v);

struct VectorIssue {
  enum class Code { unknown_skill, negative_weight, non_finite_weight, sum_drift, empty };
  Code code;
  std::string skill;  // empty for whole-vector issues
  std::string message;
};

std::string_view to_string(VectorIssue::Code code);

inline constexpr double kIngestDriftTolerance = 1e-3;

/// Lists every problem with v relative to the taxonomy; never throws.
std::vector<VectorIssue> validate_against_taxonomy(const SkillVector& v, const Taxonomy& taxonomy,
                                                   double drift_tolerance = kIngestDriftTolerance);

/// Validates then renormalizes (silently, within drift tolerance). Throws a
/// validation error listing every issue otherwise. `context` prefixes messages.
SkillVector ingest_skill_vector(const SkillVector& v, const Taxonomy& taxonomy,
                                const std::string& context,
                                double drift_tolerance = kIngestDriftTolerance);

double dot(const SkillVector& a, const SkillVector& b);

Json to_json(const SkillVector& v);
/// Shape check only (object of numbers); taxonomy checks are separate.
SkillVector skill_vector_from_json(const Json& j, const std::string& context);

}  // namespace skillroute
