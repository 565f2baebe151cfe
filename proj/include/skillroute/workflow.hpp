#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "skillroute/json_io.hpp"
#include "skillroute/skills.hpp"

namespace skillroute {

/// One workflow stage. Profiled fields are optional on disk; the profiler
/// fills the gaps. A user quality override sits beside the profiled value.
struct SubtaskProfile {
  std::string name;
  std::string description;
  std::optional<SkillVector> requirements;
  std::optional<double> complexity;
  std::optional<double> quality_sensitivity;
  std::optional<std::int64_t> est_input_tokens;
  std::optional<std::int64_t> est_output_tokens;
  std::optional<double> quality_override;

  bool needs_skill_profiling() const { return !requirements.has_value(); }
  bool needs_metadata() const;
  bool needs_profiling() const { return needs_skill_profiling() || needs_metadata(); }

  /// Override when present, otherwise the profiled value. Throws if neither exists.
  double effective_quality() const;
};

/// Ordered subtask sequence. `metadata` carries opaque extras (e.g. branch
/// structure) through load/save untouched.
struct Workflow {
  std::string name;
  std::vector<SubtaskProfile> subtasks;
  Json metadata;

  const SubtaskProfile* find(const std::string& task) const;
  std::vector<std::string> unprofiled() const;
};

Workflow parse_workflow(const Json& doc, const Taxonomy& taxonomy);
Workflow load_workflow(const std::filesystem::path& path, const Taxonomy& taxonomy);
Json to_json(const Workflow& workflow);
Json to_json(const SubtaskProfile& task);

/// Returns a copy with the task's effective quality sensitivity set to q.
Workflow apply_quality_override(const Workflow& workflow, const std::string& task, double q);

/// Throws an incomplete error naming every subtask that still needs profiling.
void require_profiled(const Workflow& workflow);

}  // namespace skillroute
