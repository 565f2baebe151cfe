#include "skillroute/prompts.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "prompt_assets.hpp"
#include "skillroute/error.hpp"

namespace skillroute {

std::string_view to_string(TemplateId id) {
  switch (id) {
    case TemplateId::benchmark_profile: return "benchmark_profile";
    case TemplateId::subtask_profile: return "subtask_profile";
    case TemplateId::pipeline_metadata: return "pipeline_metadata";
    case TemplateId::routing_explanation: return "routing_explanation";
  }
  return "unknown";
}

TemplateId template_id_from_string(std::string_view s) {
  for (auto id : {TemplateId::benchmark_profile, TemplateId::subtask_profile, TemplateId::pipeline_metadata,
                  TemplateId::routing_explanation}) {
    if (to_string(id) == s) return id;
  }
  throw Error(ErrorKind::validation, fmt::format("unknown prompt template '{}'", s));
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

/// Length of the placeholder starting at body[pos] == '{', or 0 when the brace is literal.
std::size_t placeholder_length(std::string_view body, std::size_t pos) {
  std::size_t i = pos + 1;
  if (i >= body.size() || !ident_start(body[i])) return 0;
  while (i < body.size() && ident_char(body[i])) ++i;
  if (i >= body.size() || body[i] != '}') return 0;
  return i - pos + 1;
}

template <typename Fn>
void scan(std::string_view body, Fn&& on_segment) {
  std::size_t literal_start = 0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '{') continue;
    const std::size_t len = placeholder_length(body, i);
    if (len == 0) continue;
    on_segment(body.substr(literal_start, i - literal_start), body.substr(i + 1, len - 2));
    i += len - 1;
    literal_start = i + 1;
  }
  on_segment(body.substr(literal_start), std::string_view{});
}

}  // namespace

std::vector<std::string> PromptTemplate::placeholders() const {
  std::vector<std::string> out;
  scan(body, [&](std::string_view, std::string_view name) {
    if (!name.empty() && std::find(out.begin(), out.end(), name) == out.end()) out.emplace_back(name);
  });
  return out;
}

std::string render_prompt(const PromptTemplate& tmpl, const Bindings& bindings) {
  for (const auto& name : tmpl.placeholders()) {
    if (!bindings.contains(name))
      throw Error(ErrorKind::template_binding,
                  fmt::format("{} unbound in template '{}'", name, to_string(tmpl.id)), {name});
  }
  std::string out;
  out.reserve(tmpl.body.size());
  scan(tmpl.body, [&](std::string_view literal, std::string_view name) {
    out.append(literal);
    if (!name.empty()) out.append(bindings.at(std::string(name)));
  });
  return out;
}

const PromptTemplate& builtin_template(TemplateId id) {
  static const PromptTemplate templates[] = {
      {TemplateId::benchmark_profile, std::string(assets::kPromptVersion), std::string(assets::kBenchmarkProfile)},
      {TemplateId::subtask_profile, std::string(assets::kPromptVersion), std::string(assets::kSubtaskProfile)},
      {TemplateId::pipeline_metadata, std::string(assets::kPromptVersion), std::string(assets::kPipelineMetadata)},
      {TemplateId::routing_explanation, std::string(assets::kPromptVersion),
       std::string(assets::kRoutingExplanation)},
  };
  return templates[static_cast<int>(id)];
}

}  // namespace skillroute
