#include "skillroute/profiler.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "skillroute/error.hpp"
#include "skillroute/prompts.hpp"
#include "parallel.hpp"

namespace skillroute {

namespace {

constexpr const char* kJsonReminder =
    "Your previous reply could not be parsed. Respond with only the JSON object, with no other text.";

std::string examples_block(const std::vector<std::string>& items, std::size_t limit) {
  if (items.empty()) return {};
  std::string out = "Example items:\n";
  const std::size_t n = std::min(items.size(), limit);
  for (std::size_t i = 0; i < n; ++i) out += fmt::format("{}. {}\n", i + 1, items[i]);
  out.pop_back();
  return out;
}

double number_field(const Json& obj, const char* key, const std::string& task) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw Error(ErrorKind::incomplete, fmt::format("metadata for '{}' lacks numeric '{}'", task, key));
  return obj[key].get<double>();
}

std::int64_t token_field(const Json& obj, const char* key, const std::string& task) {
  const double v = number_field(obj, key, task);
  if (!std::isfinite(v) || v < 1.0 || v != std::floor(v))
    throw Error(ErrorKind::validation,
                fmt::format("metadata for '{}': {} must be a positive integer, got {}", task, key, v));
  return static_cast<std::int64_t>(v);
}

}  // namespace

std::optional<Json> extract_json_object(const std::string& text) {
  std::string body = text;
  if (auto fence = body.find("```"); fence != std::string::npos) {
    auto start = body.find('\n', fence);
    auto end = start == std::string::npos ? std::string::npos : body.find("```", start);
    if (end != std::string::npos) body = body.substr(start + 1, end - start - 1);
  }
  const auto open = body.find('{');
  const auto close = body.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open) return std::nullopt;
  try {
    Json doc = Json::parse(body.substr(open, close - open + 1));
    if (doc.is_object()) return doc;
  } catch (const Json::parse_error&) {
  }
  return std::nullopt;
}

Profiler::Profiler(CompletionClient& client, const Taxonomy& taxonomy, ProfilerOptions options)
    : client_(client), taxonomy_(taxonomy), options_(options) {}

std::string Profiler::render_benchmark_prompt(const BenchmarkRecord& bench) const {
  return render_prompt(builtin_template(TemplateId::benchmark_profile),
                       {{"skill_definitions", taxonomy_.definitions_block()},
                        {"benchmark_name", bench.name},
                        {"benchmark_description", bench.description},
                        {"example_items_block", examples_block(bench.example_items, options_.max_examples)}});
}

std::string Profiler::render_subtask_prompt(const SubtaskProfile& task) const {
  return render_prompt(builtin_template(TemplateId::subtask_profile),
                       {{"skill_definitions", taxonomy_.definitions_block()},
                        {"task_name", task.name},
                        {"task_description", task.description}});
}

std::string Profiler::render_metadata_prompt(const Workflow& workflow) const {
  std::string list;
  for (std::size_t i = 0; i < workflow.subtasks.size(); ++i) {
    const auto& t = workflow.subtasks[i];
    list += fmt::format("{}. {}: {}\n", i + 1, t.name, t.description);
  }
  if (!list.empty()) list.pop_back();
  return render_prompt(builtin_template(TemplateId::pipeline_metadata), {{"subtask_list", list}});
}

std::string Profiler::complete_json(TemplateId id, const std::string& subject, const std::string& prompt,
                                    Json& parsed, int& attempts) {
  CompletionRequest req{id, subject, {{"user", prompt}}};
  std::vector<std::string> replies;
  for (attempts = 1; attempts <= options_.retries + 1; ++attempts) {
    std::string reply = client_.complete(req);
    if (auto doc = extract_json_object(reply)) {
      parsed = std::move(*doc);
      return reply;
    }
    replies.push_back(reply);
    req.messages.push_back({"assistant", reply});
    req.messages.push_back({"user", kJsonReminder});
  }
  attempts = options_.retries + 1;
  throw Error(ErrorKind::parse,
              fmt::format("{} completion for '{}' was not JSON after {} attempts", to_string(id), subject, attempts),
              replies);
}

ProfilerResponse Profiler::parse_skill_response(const std::string& subject, const std::string& raw, const Json& doc,
                                                int attempts) const {
  if (!doc.contains("skill_weights"))
    throw Error(ErrorKind::parse, fmt::format("completion for '{}' has no skill_weights", subject), {raw});
  ProfilerResponse out;
  out.subject = subject;
  out.raw_text = raw;
  out.attempts = attempts;
  const SkillVector v = skill_vector_from_json(doc["skill_weights"], subject);
  try {
    out.skill_weights = ingest_skill_vector(v, taxonomy_, subject, options_.max_drift);
  } catch (Error& e) {
    auto details = e.details();
    details.push_back(raw);
    throw Error(e.kind(), e.what(), details);
  }
  if (std::abs(v.sum() - 1.0) > kIngestDriftTolerance)
    out.warnings.push_back(fmt::format("{}: weights summed to {:.4f}; renormalized", subject, v.sum()));

  const auto support = out.skill_weights.support();
  if (doc.contains("rationale") && doc["rationale"].is_object()) {
    for (const auto& [skill, text] : doc["rationale"].items()) {
      if (!support.contains(skill)) {
        out.warnings.push_back(fmt::format("{}: dropped rationale for zero-weight skill '{}'", subject, skill));
        continue;
      }
      out.rationale[skill] = text.is_string() ? text.get<std::string>() : text.dump();
    }
  }
  return out;
}

ProfilerResponse Profiler::profile_benchmark(const BenchmarkRecord& bench) {
  Json doc;
  int attempts = 0;
  const std::string raw =
      complete_json(TemplateId::benchmark_profile, bench.name, render_benchmark_prompt(bench), doc, attempts);
  return parse_skill_response(bench.name, raw, doc, attempts);
}

std::vector<BenchmarkRecord> Profiler::profile_benchmarks(std::vector<BenchmarkRecord> benchmarks,
                                                          std::map<std::string, ProfilerResponse>* responses) {
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < benchmarks.size(); ++i)
    if (!benchmarks[i].skill_weights) todo.push_back(i);
  std::vector<ProfilerResponse> results(todo.size());
  detail::run_bounded(todo.size(), options_.max_parallel,
              [&](std::size_t i) { results[i] = profile_benchmark(benchmarks[todo[i]]); });
  for (std::size_t i = 0; i < todo.size(); ++i) {
    benchmarks[todo[i]].skill_weights = results[i].skill_weights;
    if (responses) (*responses)[results[i].subject] = std::move(results[i]);
  }
  return benchmarks;
}

ProfilerResponse Profiler::profile_subtask(const SubtaskProfile& task) {
  Json doc;
  int attempts = 0;
  const std::string raw =
      complete_json(TemplateId::subtask_profile, task.name, render_subtask_prompt(task), doc, attempts);
  return parse_skill_response(task.name, raw, doc, attempts);
}

PipelineMetadataResponse parse_pipeline_metadata(const Json& doc, const Workflow& workflow) {
  PipelineMetadataResponse out;
  const Json* tasks = &doc;
  // Some models wrap the mapping in a single top-level key.
  if (doc.size() == 1 && !workflow.find(doc.begin().key()) && doc.begin()->is_object()) tasks = &*doc.begin();

  std::vector<std::string> missing;
  for (const auto& t : workflow.subtasks)
    if (!tasks->contains(t.name)) missing.push_back(t.name);
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    throw Error(ErrorKind::incomplete, fmt::format("pipeline metadata is missing tasks: {}", names), missing);
  }
  for (const auto& [name, entry] : tasks->items()) {
    if (!workflow.find(name)) {
      out.warnings.push_back(fmt::format("ignored metadata for unknown task '{}'", name));
      continue;
    }
    if (!entry.is_object()) throw Error(ErrorKind::validation, fmt::format("metadata for '{}' is not an object", name));
    TaskMetadata m;
    m.complexity = number_field(entry, "complexity", name);
    m.quality_sensitivity = number_field(entry, "quality_sensitivity", name);
    for (auto [key, v] : {std::pair{"complexity", m.complexity}, std::pair{"quality_sensitivity", m.quality_sensitivity}}) {
      if (!(v >= 0.0 && v <= 1.0))
        throw Error(ErrorKind::validation, fmt::format("metadata for '{}': {} {} outside [0, 1]", name, key, v));
    }
    m.estimated_input_tokens = token_field(entry, "estimated_input_tokens", name);
    m.estimated_output_tokens = token_field(entry, "estimated_output_tokens", name);
    if (entry.contains("rationale") && entry["rationale"].is_string()) m.rationale = entry["rationale"];
    out.tasks[name] = m;
  }
  return out;
}

PipelineMetadataResponse Profiler::profile_metadata(const Workflow& workflow) {
  Json doc;
  int attempts = 0;
  const std::string raw =
      complete_json(TemplateId::pipeline_metadata, workflow.name, render_metadata_prompt(workflow), doc, attempts);
  PipelineMetadataResponse out;
  try {
    out = parse_pipeline_metadata(doc, workflow);
  } catch (Error& e) {
    auto details = e.details();
    details.push_back(raw);
    throw Error(e.kind(), e.what(), details);
  }
  out.raw_text = raw;
  out.attempts = attempts;
  return out;
}

SubtaskProfiling Profiler::profile_subtasks(const Workflow& workflow) {
  SubtaskProfiling out{workflow, {}, std::nullopt};
  auto& tasks = out.workflow.subtasks;

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (tasks[i].needs_skill_profiling()) todo.push_back(i);
  std::vector<ProfilerResponse> results(todo.size());
  detail::run_bounded(todo.size(), options_.max_parallel, [&](std::size_t i) { results[i] = profile_subtask(tasks[todo[i]]); });
  for (std::size_t i = 0; i < todo.size(); ++i) {
    tasks[todo[i]].requirements = results[i].skill_weights;
    out.skills[results[i].subject] = std::move(results[i]);
  }

  const bool need_meta = std::any_of(tasks.begin(), tasks.end(), [](const auto& t) { return t.needs_metadata(); });
  if (need_meta) {
    out.metadata = profile_metadata(workflow);
    for (auto& t : tasks) {
      const TaskMetadata& m = out.metadata->tasks.at(t.name);
      if (!t.complexity) t.complexity = m.complexity;
      if (!t.quality_sensitivity) t.quality_sensitivity = m.quality_sensitivity;
      if (!t.est_input_tokens) t.est_input_tokens = m.estimated_input_tokens;
      if (!t.est_output_tokens) t.est_output_tokens = m.estimated_output_tokens;
    }
  }
  return out;
}

Json to_json(const ProfilerResponse& r) {
  Json rationale = Json::object();
  for (const auto& [k, v] : r.rationale) rationale[k] = v;
  return {{"subject", r.subject},   {"skill_weights", to_json(r.skill_weights)},
          {"rationale", rationale}, {"raw_text", r.raw_text},
          {"warnings", r.warnings}, {"attempts", r.attempts}};
}

Json to_json(const PipelineMetadataResponse& r) {
  Json tasks = Json::object();
  for (const auto& [name, m] : r.tasks) {
    tasks[name] = {{"complexity", m.complexity},
                   {"quality_sensitivity", m.quality_sensitivity},
                   {"estimated_input_tokens", m.estimated_input_tokens},
                   {"estimated_output_tokens", m.estimated_output_tokens},
                   {"rationale", m.rationale}};
  }
  return {{"tasks", tasks}, {"raw_text", r.raw_text}, {"warnings", r.warnings}, {"attempts", r.attempts}};
}

}  // namespace skillroute
