#include "skillroute/workflow.hpp"

#include <set>

#include <fmt/format.h>

#include "skillroute/error.hpp"

namespace skillroute {

bool SubtaskProfile::needs_metadata() const {
  return !complexity || !quality_sensitivity || !est_input_tokens || !est_output_tokens;
}

double SubtaskProfile::effective_quality() const {
  if (quality_override) return *quality_override;
  if (quality_sensitivity) return *quality_sensitivity;
  throw Error(ErrorKind::incomplete, fmt::format("subtask '{}' has no quality sensitivity", name));
}

const SubtaskProfile* Workflow::find(const std::string& task) const {
  for (const auto& t : subtasks)
    if (t.name == task) return &t;
  return nullptr;
}

std::vector<std::string> Workflow::unprofiled() const {
  std::vector<std::string> out;
  for (const auto& t : subtasks)
    if (t.needs_profiling()) out.push_back(t.name);
  return out;
}

namespace {

void check_unit(const std::optional<double>& v, const std::string& task, const char* field,
                std::vector<std::string>& problems) {
  if (v && !(*v >= 0.0 && *v <= 1.0))
    problems.push_back(fmt::format("subtask '{}': {} {} outside [0, 1]", task, field, *v));
}

std::optional<double> optional_number(const Json& obj, const char* key, const std::string& task,
                                      std::vector<std::string>& problems) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) {
    problems.push_back(fmt::format("subtask '{}': {} must be numeric", task, key));
    return std::nullopt;
  }
  return it->get<double>();
}

std::optional<std::int64_t> optional_tokens(const Json& obj, const char* key, const std::string& task,
                                            std::vector<std::string>& problems) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer() || it->get<std::int64_t>() < 1) {
    problems.push_back(fmt::format("subtask '{}': {} must be a positive integer", task, key));
    return std::nullopt;
  }
  return it->get<std::int64_t>();
}

}  // namespace

Workflow parse_workflow(const Json& doc, const Taxonomy& taxonomy) {
  if (!doc.is_object()) throw Error(ErrorKind::validation, "workflow file must be an object");
  Workflow wf;
  wf.name = doc.value("name", std::string{});
  wf.metadata = doc.value("metadata", Json::object());
  if (!doc.contains("subtasks") || !doc["subtasks"].is_array())
    throw Error(ErrorKind::validation, "workflow file: missing 'subtasks' array");

  std::vector<std::string> problems;
  std::set<std::string> seen;
  for (const auto& item : doc["subtasks"]) {
    if (!item.is_object() || !item.contains("name") || !item["name"].is_string()) {
      problems.push_back("workflow: every subtask needs a string 'name'");
      continue;
    }
    SubtaskProfile t;
    t.name = item["name"].get<std::string>();
    t.description = item.value("description", std::string{});
    if (!seen.insert(t.name).second) problems.push_back(fmt::format("duplicate subtask name '{}'", t.name));
    if (auto it = item.find("requirements"); it != item.end() && !it->is_null()) {
      const std::string ctx = fmt::format("subtask '{}' requirements", t.name);
      try {
        t.requirements = ingest_skill_vector(skill_vector_from_json(*it, ctx), taxonomy, ctx);
      } catch (const Error& e) {
        problems.push_back(e.what());
        problems.insert(problems.end(), e.details().begin(), e.details().end());
      }
    }
    t.complexity = optional_number(item, "complexity", t.name, problems);
    t.quality_sensitivity = optional_number(item, "quality_sensitivity", t.name, problems);
    t.quality_override = optional_number(item, "quality_override", t.name, problems);
    t.est_input_tokens = optional_tokens(item, "est_input_tokens", t.name, problems);
    t.est_output_tokens = optional_tokens(item, "est_output_tokens", t.name, problems);
    check_unit(t.complexity, t.name, "complexity", problems);
    check_unit(t.quality_sensitivity, t.name, "quality_sensitivity", problems);
    check_unit(t.quality_override, t.name, "quality_override", problems);
    if (t.complexity && *t.complexity == 0.0)
      problems.push_back(fmt::format("subtask '{}': complexity must be positive", t.name));
    wf.subtasks.push_back(std::move(t));
  }
  if (wf.subtasks.empty() && problems.empty()) problems.push_back("workflow has no subtasks");
  if (!problems.empty()) throw Error(ErrorKind::validation, "invalid workflow", problems);
  return wf;
}

Workflow load_workflow(const std::filesystem::path& path, const Taxonomy& taxonomy) {
  return parse_workflow(read_json_file(path), taxonomy);
}

Json to_json(const SubtaskProfile& t) {
  Json j{{"name", t.name}, {"description", t.description}};
  if (t.requirements) j["requirements"] = to_json(*t.requirements);
  if (t.complexity) j["complexity"] = *t.complexity;
  if (t.quality_sensitivity) j["quality_sensitivity"] = *t.quality_sensitivity;
  if (t.quality_override) j["quality_override"] = *t.quality_override;
  if (t.est_input_tokens) j["est_input_tokens"] = *t.est_input_tokens;
  if (t.est_output_tokens) j["est_output_tokens"] = *t.est_output_tokens;
  return j;
}

Json to_json(const Workflow& wf) {
  Json tasks = Json::array();
  for (const auto& t : wf.subtasks) tasks.push_back(to_json(t));
  Json j{{"schema_version", kSchemaVersion}, {"name", wf.name}, {"subtasks", tasks}};
  if (!wf.metadata.is_null() && !wf.metadata.empty()) j["metadata"] = wf.metadata;
  return j;
}

Workflow apply_quality_override(const Workflow& workflow, const std::string& task, double q) {
  if (!(q >= 0.0 && q <= 1.0))
    throw Error(ErrorKind::validation, fmt::format("quality override {} for '{}' outside [0, 1]", q, task));
  Workflow out = workflow;
  for (auto& t : out.subtasks) {
    if (t.name == task) {
      t.quality_override = q;
      return out;
    }
  }
  throw Error(ErrorKind::validation, fmt::format("quality override names unknown subtask '{}'", task));
}

void require_profiled(const Workflow& workflow) {
  auto missing = workflow.unprofiled();
  if (!missing.empty()) {
    throw Error(ErrorKind::incomplete,
                fmt::format("subtask(s) need profiling before routing: {}", fmt::join(missing, ", ")), missing);
  }
}

}  // namespace skillroute
