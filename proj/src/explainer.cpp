#include "skillroute/explainer.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>

#include <fmt/format.h>

#include "parallel.hpp"
#include "skillroute/error.hpp"
#include "skillroute/prompts.hpp"

namespace skillroute {

ExplanationLog build_log(const RoutingResult& result, const Workflow& workflow, const Taxonomy& taxonomy) {
  if (result.decisions.empty()) throw Error(ErrorKind::incomplete, "explanation log: routing result has no decisions");
  for (const auto& d : result.decisions) {
    if (d.candidates.empty())
      throw Error(ErrorKind::incomplete, fmt::format("explanation log: task '{}' has no candidates", d.task));
    if (!workflow.find(d.task))
      throw Error(ErrorKind::incomplete, fmt::format("explanation log: task '{}' missing from workflow", d.task));
  }
  for (const auto& t : workflow.subtasks) {
    if (!result.find(t.name))
      throw Error(ErrorKind::incomplete, fmt::format("explanation log: no decision for task '{}'", t.name));
  }
  return ExplanationLog{result, workflow, taxonomy, builtin_template(TemplateId::routing_explanation).version};
}

namespace {

Json task_spec(const SubtaskProfile& t) {
  Json j = to_json(t);
  j["quality"] = {{"original", t.quality_sensitivity ? Json(*t.quality_sensitivity) : Json(nullptr)},
                  {"override", t.quality_override ? Json(*t.quality_override) : Json(nullptr)},
                  {"effective", t.effective_quality()}};
  return j;
}

}  // namespace

Json to_json(const ExplanationLog& log) {
  Json doc = to_json(log.result);
  Json tasks = Json::array();
  for (const auto& t : log.workflow.subtasks) tasks.push_back(task_spec(t));
  doc["workflow"] = {{"name", log.workflow.name}, {"subtasks", tasks}};
  if (!log.workflow.metadata.is_null() && !log.workflow.metadata.empty())
    doc["workflow"]["metadata"] = log.workflow.metadata;
  doc["skills"] = to_json(log.taxonomy)["skills"];
  doc["prompt"] = {{"template", std::string(to_string(TemplateId::routing_explanation))},
                   {"version", log.prompt_version}};
  return doc;
}

ExplanationLog explanation_log_from_json(const Json& doc) {
  for (const char* key : {"workflow", "skills", "prompt"}) {
    if (!doc.contains(key)) throw Error(ErrorKind::incomplete, fmt::format("explanation log: missing '{}'", key));
  }
  ExplanationLog log;
  log.result = routing_result_from_json(doc);
  log.taxonomy = parse_taxonomy(Json{{"skills", doc["skills"]}});
  Json wf = doc["workflow"];
  for (auto& t : wf["subtasks"]) t.erase("quality");
  log.workflow = parse_workflow(wf, log.taxonomy);
  log.prompt_version = doc["prompt"].value("version", std::string{});
  build_log(log.result, log.workflow, log.taxonomy);  // same completeness checks as a fresh log
  return log;
}

namespace {

LogSlice seal(std::optional<std::string> task, Json data) {
  LogSlice s{std::move(task), std::move(data), {}};
  s.digest = sha256_hex(canonical_dump(s.data));
  return s;
}

}  // namespace

LogSlice global_slice(const ExplanationLog& log) {
  Json doc = to_json(log);
  doc.erase("skills");
  doc.erase("prompt");
  doc["scope"] = "global";
  return seal(std::nullopt, std::move(doc));
}

LogSlice local_slice(const ExplanationLog& log, const std::string& task) {
  const RoutingDecision* d = log.result.find(task);
  const SubtaskProfile* spec = log.workflow.find(task);
  if (!d || !spec) throw Error(ErrorKind::validation, fmt::format("no routing decision for task '{}'", task));
  const Json full = to_json(log.result);
  Json doc{{"schema_version", kSchemaVersion},
           {"scope", "local"},
           {"mode", full["mode"]},
           {"config", full["config"]},
           {"subtask", task_spec(*spec)},
           {"decision", to_json(*d, log.result.config.mode)}};
  return seal(task, std::move(doc));
}

void verify_slice(const LogSlice& slice) {
  const std::string actual = sha256_hex(canonical_dump(slice.data));
  if (actual != slice.digest) {
    throw Error(ErrorKind::integrity,
                fmt::format("log slice '{}' does not match its digest", slice.scope()), {slice.digest, actual});
  }
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

/// Case-insensitive whole-phrase search; `hay` must already be lower case.
bool mentions(const std::string& hay, const std::string& needle) {
  const std::string n = lower(needle);
  if (n.empty()) return false;
  for (auto pos = hay.find(n); pos != std::string::npos; pos = hay.find(n, pos + 1)) {
    const bool left = pos == 0 || !word_char(hay[pos - 1]);
    const std::size_t end = pos + n.size();
    // A hyphen after the match means a longer model-like token, e.g. "GPT" inside "GPT-4o".
    const bool right = end >= hay.size() || (!word_char(hay[end]) && hay[end] != '-');
    if (left && right) return true;
  }
  return false;
}

std::set<std::string> slice_models(const LogSlice& slice) {
  std::set<std::string> out;
  auto collect = [&](const Json& decision) {
    for (const auto& c : decision["candidates"]) out.insert(c["model"].get<std::string>());
  };
  if (slice.data.contains("decision")) collect(slice.data["decision"]);
  if (slice.data.contains("decisions"))
    for (const auto& d : slice.data["decisions"]) collect(d);
  return out;
}

std::set<std::string> slice_tasks(const LogSlice& slice) {
  std::set<std::string> out;
  if (slice.data.contains("decision")) out.insert(slice.data["decision"]["task"].get<std::string>());
  if (slice.data.contains("decisions"))
    for (const auto& d : slice.data["decisions"]) out.insert(d["task"].get<std::string>());
  return out;
}

}  // namespace

GroundingReport check_grounding(const std::string& text, const LogSlice& slice, const ExplanationLog& log) {
  GroundingReport report;
  const std::string hay = lower(text);

  std::set<std::string> known_models;
  for (const auto& d : log.result.decisions)
    for (const auto& c : d.candidates) known_models.insert(c.model);
  std::map<std::string, std::vector<std::string>> by_alias;
  for (const auto& m : known_models) by_alias[lower(m.substr(0, m.find('-')))].push_back(m);

  for (const auto& m : known_models) {
    const std::string alias = m.substr(0, m.find('-'));
    const bool unique_alias = by_alias[lower(alias)].size() == 1;
    if (mentions(hay, m) || (unique_alias && alias != m && mentions(hay, alias))) report.models.insert(m);
  }
  // Model-shaped tokens that are not one of the routed models.
  static const std::regex model_like(R"(\b[A-Za-z][A-Za-z0-9]*(?:-[A-Za-z0-9.]*[A-Za-z0-9])+)");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), model_like); it != std::sregex_iterator(); ++it) {
    const std::string token = it->str();
    if (std::none_of(token.begin(), token.end(), [](unsigned char c) { return std::isdigit(c); })) continue;
    const bool known = std::any_of(known_models.begin(), known_models.end(),
                                   [&](const std::string& m) { return lower(m) == lower(token); });
    if (!known) report.violations.push_back(fmt::format("mentions unknown model '{}'", token));
  }

  for (const auto& t : log.workflow.subtasks)
    if (mentions(hay, t.name)) report.tasks.insert(t.name);
  for (const auto& s : log.taxonomy.skills()) {
    std::string spaced = s.id;
    std::replace(spaced.begin(), spaced.end(), '_', ' ');
    if (mentions(hay, s.id) || mentions(hay, spaced)) report.skills.insert(s.id);
  }

  const auto models_in_slice = slice_models(slice);
  const auto tasks_in_slice = slice_tasks(slice);
  for (const auto& m : report.models)
    if (!models_in_slice.contains(m)) report.violations.push_back(fmt::format("model '{}' is not in the log slice", m));
  for (const auto& t : report.tasks)
    if (!tasks_in_slice.contains(t)) report.violations.push_back(fmt::format("task '{}' is not in the log slice", t));
  return report;
}

Explainer::Explainer(CompletionClient* client, ExplainerOptions options) : client_(client), options_(options) {
  if (!client_ && !options_.dry_run)
    throw Error(ErrorKind::config, "explanations need a completion endpoint, fixtures, or dry-run mode");
}

std::string Explainer::render(const LogSlice& slice) const {
  verify_slice(slice);
  return render_prompt(builtin_template(TemplateId::routing_explanation), {{"explain_log", canonical_dump(slice.data)}});
}

namespace {

std::size_t sentence_count(const std::string& text) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if ((c == '.' || c == '!' || c == '?') && (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]))))
      ++n;
  }
  return n;
}

}  // namespace

Explanation Explainer::explain(const LogSlice& slice, const ExplanationLog& log) {
  Explanation out;
  out.scope = slice.scope();
  out.task = slice.task;
  out.source_log_digest = slice.digest;
  const std::string prompt = render(slice);
  if (options_.dry_run) {
    out.text = prompt;
    out.dry_run = true;
    return out;
  }
  out.text = client_->complete(CompletionRequest{TemplateId::routing_explanation, out.scope, {{"user", prompt}}});
  const auto sentences = sentence_count(out.text);
  if (sentences < 3 || sentences > 4)
    out.warnings.push_back(fmt::format("{}: explanation has {} sentences, expected 3-4", out.scope, sentences));
  out.grounding = check_grounding(out.text, slice, log);
  for (const auto& v : out.grounding.violations) out.warnings.push_back(fmt::format("{}: {}", out.scope, v));
  return out;
}

Explanation Explainer::explain_global(const ExplanationLog& log) { return explain(global_slice(log), log); }

Explanation Explainer::explain_local(const ExplanationLog& log, const std::string& task) {
  return explain(local_slice(log, task), log);
}

std::vector<Explanation> Explainer::explain_all(const ExplanationLog& log) {
  std::vector<LogSlice> slices{global_slice(log)};
  for (const auto& d : log.result.decisions) slices.push_back(local_slice(log, d.task));
  std::vector<Explanation> out(slices.size());
  detail::run_bounded(slices.size(), options_.max_parallel, [&](std::size_t i) { out[i] = explain(slices[i], log); });
  return out;
}

std::string format_explanations(const std::vector<Explanation>& explanations) {
  std::string out;
  for (const auto& e : explanations) {
    out += fmt::format("=== {} [sha256:{}]{}\n", e.scope, e.source_log_digest, e.dry_run ? " (dry run)" : "");
    out += e.text;
    if (!e.text.empty() && e.text.back() != '\n') out += '\n';
    for (const auto& w : e.warnings) out += fmt::format("! {}\n", w);
    out += '\n';
  }
  return out;
}

}  // namespace skillroute
