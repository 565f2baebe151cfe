#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "skillroute/json_io.hpp"
#include "skillroute/llm_client.hpp"
#include "skillroute/models.hpp"
#include "skillroute/skills.hpp"
#include "skillroute/workflow.hpp"

namespace skillroute {

struct ProfilerResponse {
  std::string subject;
  SkillVector skill_weights;  // validated and renormalized
  std::map<std::string, std::string> rationale;
  std::string raw_text;  // verbatim completion that was accepted
  std::vector<std::string> warnings;
  int attempts = 1;
};

struct TaskMetadata {
  double complexity = 0.0;
  double quality_sensitivity = 0.0;
  std::int64_t estimated_input_tokens = 0;
  std::int64_t estimated_output_tokens = 0;
  std::string rationale;
};

struct PipelineMetadataResponse {
  std::map<std::string, TaskMetadata> tasks;
  std::string raw_text;
  std::vector<std::string> warnings;
  int attempts = 1;
};

struct ProfilerOptions {
  std::size_t max_parallel = 4;
  int retries = 2;  // extra attempts after an unparseable completion
  /// Weight sums further than this from one are rejected; anything past
  /// kIngestDriftTolerance is renormalized with a warning.
  double max_drift = 0.05;
  std::size_t max_examples = 5;
};

struct SubtaskProfiling {
  Workflow workflow;  // gaps filled, user fields untouched
  std::map<std::string, ProfilerResponse> skills;
  std::optional<PipelineMetadataResponse> metadata;
};

class Profiler {
 public:
  Profiler(CompletionClient& client, const Taxonomy& taxonomy, ProfilerOptions options = {});

  std::string render_benchmark_prompt(const BenchmarkRecord& bench) const;
  std::string render_subtask_prompt(const SubtaskProfile& task) const;
  std::string render_metadata_prompt(const Workflow& workflow) const;

  ProfilerResponse profile_benchmark(const BenchmarkRecord& bench);

  /// Profiles every benchmark without skill weights; existing weights are kept.
  std::vector<BenchmarkRecord> profile_benchmarks(std::vector<BenchmarkRecord> benchmarks,
                                                  std::map<std::string, ProfilerResponse>* responses = nullptr);

  ProfilerResponse profile_subtask(const SubtaskProfile& task);
  /// One metadata call covering every task in the workflow.
  PipelineMetadataResponse profile_metadata(const Workflow& workflow);

  /// Fills requirements per task and metadata jointly. The metadata prompt runs
  /// whenever any task lacks a metadata field.
  SubtaskProfiling profile_subtasks(const Workflow& workflow);

 private:
  std::string complete_json(TemplateId id, const std::string& subject, const std::string& prompt, Json& parsed,
                            int& attempts);
  ProfilerResponse parse_skill_response(const std::string& subject, const std::string& raw, const Json& doc,
                                        int attempts) const;

  CompletionClient& client_;
  const Taxonomy& taxonomy_;
  ProfilerOptions options_;
};

/// Strips markdown code fences and surrounding prose, then parses the outermost
/// JSON object. Returns nullopt when nothing parses.
std::optional<Json> extract_json_object(const std::string& text);

PipelineMetadataResponse parse_pipeline_metadata(const Json& doc, const Workflow& workflow);

Json to_json(const ProfilerResponse& r);
Json to_json(const PipelineMetadataResponse& r);

}  // namespace skillroute
