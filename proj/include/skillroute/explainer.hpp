#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "skillroute/json_io.hpp"
#include "skillroute/llm_client.hpp"
#include "skillroute/routing.hpp"
#include "skillroute/skills.hpp"
#include "skillroute/workflow.hpp"

namespace skillroute {

/// Everything an explanation may draw on: the routing result verbatim plus the
/// subtask specifications and taxonomy it was computed from.
struct ExplanationLog {
  RoutingResult result;
  Workflow workflow;  // specifications as routed, overrides included
  Taxonomy taxonomy;
  std::string prompt_version;
};

/// Throws an incomplete error when there are no decisions, when a task has no
/// candidates, or when a decision names a task missing from the workflow.
ExplanationLog build_log(const RoutingResult& result, const Workflow& workflow, const Taxonomy& taxonomy);

/// routing_result.json fields plus "subtasks", "skills" and "prompt".
Json to_json(const ExplanationLog& log);
ExplanationLog explanation_log_from_json(const Json& doc);

/// Subset of the log handed to one rendering call, sealed with a digest of its
/// canonical text.
struct LogSlice {
  std::optional<std::string> task;  // nullopt: global scope
  Json data;
  std::string digest;

  std::string scope() const { return task ? "local:" + *task : "global"; }
};

LogSlice global_slice(const ExplanationLog& log);
/// Config, the task's specification and its decision only. Unknown task is a validation error.
LogSlice local_slice(const ExplanationLog& log, const std::string& task);
/// Throws an integrity error when the slice no longer matches its digest.
void verify_slice(const LogSlice& slice);

struct GroundingReport {
  std::set<std::string> models;  // canonical names mentioned
  std::set<std::string> tasks;
  std::set<std::string> skills;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Finds model, task and skill mentions in `text` and flags any model or task
/// that is not part of `slice`. Models also match by the part before their
/// first hyphen ("Gemini" for "Gemini-3-Pro"); skill ids match with underscores
/// read as spaces. Model-like tokens that match no known model are violations.
GroundingReport check_grounding(const std::string& text, const LogSlice& slice, const ExplanationLog& log);

struct Explanation {
  std::string scope;
  std::optional<std::string> task;
  std::string text;  // prose, or the rendered prompt in dry-run mode
  std::string source_log_digest;
  bool dry_run = false;
  GroundingReport grounding;
  std::vector<std::string> warnings;
};

struct ExplainerOptions {
  bool dry_run = false;
  std::size_t max_parallel = 4;
};

class Explainer {
 public:
  /// `client` may be null only in dry-run mode.
  Explainer(CompletionClient* client, ExplainerOptions options = {});

  std::string render(const LogSlice& slice) const;
  Explanation explain(const LogSlice& slice, const ExplanationLog& log);
  Explanation explain_global(const ExplanationLog& log);
  Explanation explain_local(const ExplanationLog& log, const std::string& task);
  /// Global first, then one local per decision in routing order.
  std::vector<Explanation> explain_all(const ExplanationLog& log);

 private:
  CompletionClient* client_;
  ExplainerOptions options_;
};

/// Plain-text blocks tagged with scope and digest.
std::string format_explanations(const std::vector<Explanation>& explanations);

}  // namespace skillroute
