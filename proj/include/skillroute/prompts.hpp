#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace skillroute {

enum class TemplateId { benchmark_profile, subtask_profile, pipeline_metadata, routing_explanation };

std::string_view to_string(TemplateId id);
TemplateId template_id_from_string(std::string_view s);

/// Prompt text with `{identifier}` placeholders. Any other brace sequence,
/// such as the JSON shape examples in the profiling prompts, is literal.
struct PromptTemplate {
  TemplateId id;
  std::string version;
  std::string body;

  /// Distinct placeholder names in order of first appearance.
  std::vector<std::string> placeholders() const;
};

/// Built-in templates compiled from prompts/<version>/*.txt.
const PromptTemplate& builtin_template(TemplateId id);

using Bindings = std::map<std::string, std::string>;

/// Single-pass substitution; bound values are not rescanned. Throws a
/// template error naming the first unbound placeholder.
std::string render_prompt(const PromptTemplate& tmpl, const Bindings& bindings);

}  // namespace skillroute
