#include "skillroute/skills.hpp"

#include <cmath>
#include <unordered_set>

#include <fmt/format.h>

#include "skillroute/error.hpp"

namespace skillroute {

Taxonomy::Taxonomy(std::vector<Skill> skills) : skills_(std::move(skills)) {
  std::vector<std::string> problems;
  std::unordered_set<std::string> seen;
  for (const auto& s : skills_) {
    if (s.id.empty()) problems.push_back("skill with empty id");
    if (s.description.empty()) problems.push_back(fmt::format("skill '{}' has an empty description", s.id));
    if (!seen.insert(s.id).second) problems.push_back(fmt::format("duplicate skill id '{}'", s.id));
  }
  if (skills_.empty()) problems.push_back("taxonomy has no skills");
  if (!problems.empty()) throw Error(ErrorKind::validation, "invalid skill taxonomy", problems);
}

const Taxonomy& Taxonomy::canonical() {
  static const Taxonomy taxonomy({
      {"mathematical_reasoning",
       "Solving quantitative problems: arithmetic, algebra, and multi-step numeric derivations."},
      {"logical_reasoning",
       "Drawing valid inferences, following multi-step arguments, and diagnosing causes from evidence."},
      {"code_generation", "Writing, repairing, and reasoning about source code and program behaviour."},
      {"tool_use",
       "Selecting and invoking external functions, APIs, or search tools with well-formed arguments."},
      {"factual_knowledge", "Recalling accurate world and domain knowledge without external lookup."},
      {"writing_quality", "Producing clear, fluent, well-organised prose in an appropriate tone."},
      {"instruction_following",
       "Adhering precisely to explicit formats, constraints, and task instructions."},
      {"summarization", "Condensing long or multi-source input into faithful, concise summaries."},
  });
  return taxonomy;
}

std::vector<std::string> Taxonomy::ids() const {
  std::vector<std::string> out;
  out.reserve(skills_.size());
  for (const auto& s : skills_) out.push_back(s.id);
  return out;
}

bool Taxonomy::contains(const std::string& id) const {
  for (const auto& s : skills_)
    if (s.id == id) return true;
  return false;
}

std::string Taxonomy::definitions_block() const {
  std::string out;
  for (const auto& s : skills_) out += fmt::format("- {}: {}\n", s.id, s.description);
  if (!out.empty()) out.pop_back();
  return out;
}

Taxonomy parse_taxonomy(const Json& doc) {
  const Json& arr = unwrap_array(doc, "skills", "skills file");
  std::vector<Skill> skills;
  for (const auto& item : arr) {
    if (!item.is_object() || !item.contains("id") || !item["id"].is_string())
      throw Error(ErrorKind::validation, "skills file: every entry needs a string 'id'");
    skills.push_back({item["id"].get<std::string>(), item.value("description", std::string{})});
  }
  return Taxonomy(std::move(skills));
}

Taxonomy load_taxonomy(const std::filesystem::path& path) { return parse_taxonomy(read_json_file(path)); }

Json to_json(const Taxonomy& taxonomy) {
  Json arr = Json::array();
  for (const auto& s : taxonomy.skills()) arr.push_back({{"id", s.id}, {"description", s.description}});
  return Json{{"schema_version", kSchemaVersion}, {"skills", arr}};
}

double SkillVector::weight(const std::string& skill) const {
  auto it = weights_.find(skill);
  return it == weights_.end() ? 0.0 : it->second;
}

double SkillVector::sum() const {
  double s = 0.0;
  for (const auto& [_, w] : weights_) s += w;
  return s;
}

std::set<std::string> SkillVector::support() const {
  std::set<std::string> out;
  for (const auto& [k, w] : weights_)
    if (w > 0.0) out.insert(k);
  return out;
}

SkillVector normalize(const SkillVector& v) {
  for (const auto& [k, w] : v.weights()) {
    if (!std::isfinite(w) || w < 0.0)
      throw Error(ErrorKind::domain, fmt::format("cannot normalize: weight for '{}' is {}", k, w));
  }
  const double total = v.sum();
  if (!(total > 0.0)) throw Error(ErrorKind::domain, "normalization undefined for an all-zero skill vector");
  if (std::abs(total - 1.0) <= 1e-12) return v;
  SkillVector::Weights out;
  for (const auto& [k, w] : v.weights()) out.emplace(k, w / total);
  return SkillVector(std::move(out));
}

std::string_view to_string(VectorIssue::Code code) {
  switch (code) {
    case VectorIssue::Code::unknown_skill: return "unknown skill";
    case VectorIssue::Code::negative_weight: return "negative weight";
    case VectorIssue::Code::non_finite_weight: return "non-finite weight";
    case VectorIssue::Code::sum_drift: return "sum drift";
    case VectorIssue::Code::empty: return "empty vector";
  }
  return "issue";
}

std::vector<VectorIssue> validate_against_taxonomy(const SkillVector& v, const Taxonomy& taxonomy,
                                                   double drift_tolerance) {
  using Code = VectorIssue::Code;
  std::vector<VectorIssue> issues;
  bool all_finite = true;
  for (const auto& [k, w] : v.weights()) {
    if (!taxonomy.contains(k))
      issues.push_back({Code::unknown_skill, k, fmt::format("unknown skill '{}'", k)});
    if (!std::isfinite(w)) {
      all_finite = false;
      issues.push_back({Code::non_finite_weight, k, fmt::format("weight for '{}' is not finite", k)});
    } else if (w < 0.0) {
      issues.push_back({Code::negative_weight, k, fmt::format("negative weight {} for '{}'", w, k)});
    }
  }
  if (all_finite) {
    // L1 mass, so a negative entry cannot hide drift by cancelling a surplus.
    double total = 0.0;
    for (const auto& [k, w] : v.weights()) total += std::abs(w);
    if (total == 0.0) {
      issues.push_back({Code::empty, "", "skill vector has no positive weight"});
    } else if (std::abs(total - 1.0) > drift_tolerance) {
      issues.push_back({Code::sum_drift, "",
                        fmt::format("weight magnitudes sum to {:.6f}, drift exceeds {}", total, drift_tolerance)});
    }
  }
  return issues;
}

SkillVector ingest_skill_vector(const SkillVector& v, const Taxonomy& taxonomy, const std::string& context,
                                double drift_tolerance) {
  auto issues = validate_against_taxonomy(v, taxonomy, drift_tolerance);
  if (!issues.empty()) {
    std::vector<std::string> details;
    for (const auto& i : issues) details.push_back(fmt::format("{}: {}", context, i.message));
    throw Error(ErrorKind::validation, fmt::format("{}: invalid skill vector", context), details);
  }
  return normalize(v);
}

double dot(const SkillVector& a, const SkillVector& b) {
  double s = 0.0;
  for (const auto& [k, w] : a.weights()) s += w * b.weight(k);
  return s;
}

Json to_json(const SkillVector& v) {
  Json j = Json::object();
  for (const auto& [k, w] : v.weights()) j[k] = w;
  return j;
}

SkillVector skill_vector_from_json(const Json& j, const std::string& context) {
  if (!j.is_object()) throw Error(ErrorKind::validation, fmt::format("{}: skill vector must be an object", context));
  SkillVector::Weights w;
  for (const auto& [k, val] : j.items()) {
    if (!val.is_number())
      throw Error(ErrorKind::validation, fmt::format("{}: weight for '{}' is not a number", context, k));
    w.emplace(k, val.get<double>());
  }
  return SkillVector(std::move(w));
}

}  // namespace skillroute
