#include "skillroute/llm_client.hpp"

#include <cstdlib>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <fmt/format.h>

#include "skillroute/error.hpp"
#include "skillroute/json_io.hpp"

namespace skillroute {

const std::string& CompletionRequest::prompt() const {
  for (const auto& m : messages)
    if (m.role == "user") return m.content;
  throw Error(ErrorKind::validation, "completion request has no user message");
}

std::optional<EndpointConfig> EndpointConfig::from_env() {
  auto get = [](const char* name) -> std::string {
    const char* v = std::getenv(name);
    return v ? std::string(v) : std::string{};
  };
  EndpointConfig c;
  c.url = get("PROFILER_ENDPOINT");
  if (c.url.empty()) return std::nullopt;
  c.model = get("PROFILER_MODEL");
  c.api_key = get("PROFILER_API_KEY");
  return c;
}

HttpCompletionClient::HttpCompletionClient(EndpointConfig config) : config_(std::move(config)) {
  const auto scheme_end = config_.url.find("://");
  if (scheme_end == std::string::npos)
    throw Error(ErrorKind::config, fmt::format("endpoint URL '{}' has no scheme", config_.url));
  const auto path_start = config_.url.find('/', scheme_end + 3);
  scheme_host_port_ = config_.url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : config_.url.substr(path_start);
}

std::string HttpCompletionClient::complete(const CompletionRequest& request) {
  Json body{{"model", config_.model}, {"messages", Json::array()}};
  for (const auto& m : request.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  if (config_.temperature) body["temperature"] = *config_.temperature;

  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorKind::endpoint, fmt::format("request for '{}' failed: {}", request.subject,
                                                 httplib::to_string(res.error())));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorKind::endpoint,
                fmt::format("endpoint returned HTTP {} for '{}'", res->status, request.subject), {res->body});
  }
  Json reply;
  try {
    reply = Json::parse(res->body);
  } catch (const Json::parse_error&) {
    throw Error(ErrorKind::endpoint, "endpoint reply is not JSON", {res->body});
  }
  if (!reply.contains("choices") || !reply["choices"].is_array() || reply["choices"].empty())
    throw Error(ErrorKind::endpoint, "endpoint reply has no choices", {res->body});
  const Json& choice = reply["choices"][0];
  if (choice.contains("message") && choice["message"].contains("content") && choice["message"]["content"].is_string())
    return choice["message"]["content"].get<std::string>();
  if (choice.contains("text") && choice["text"].is_string()) return choice["text"].get<std::string>();
  throw Error(ErrorKind::endpoint, "endpoint reply has no text content", {res->body});
}

FixtureCompletionClient::FixtureCompletionClient(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string fixture_key(std::string_view prompt) { return sha256_hex(prompt).substr(0, 16); }

std::filesystem::path fixture_path(const std::filesystem::path& dir, TemplateId id, std::string_view prompt) {
  return dir / std::string(to_string(id)) / (fixture_key(prompt) + ".json");
}

std::string FixtureCompletionClient::complete(const CompletionRequest& request) {
  const auto path = fixture_path(dir_, request.template_id, request.prompt());
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorKind::fixture_miss,
                fmt::format("no {} fixture for '{}' (expected {})", to_string(request.template_id), request.subject,
                            path.string()));
  }
  const Json doc = read_json_file(path);
  if (!doc.contains("completion") || !doc["completion"].is_string())
    throw Error(ErrorKind::validation, fmt::format("fixture {} has no 'completion' text", path.string()));
  return doc["completion"].get<std::string>();
}

RecordingCompletionClient::RecordingCompletionClient(CompletionClient& inner, std::filesystem::path dir)
    : inner_(inner), dir_(std::move(dir)) {}

std::string RecordingCompletionClient::complete(const CompletionRequest& request) {
  std::string text = inner_.complete(request);
  // Retries share the first prompt's key; the last reply wins, which is the one that parsed.
  write_fixture(dir_, request.template_id, request.subject, request.prompt(), text);
  return text;
}

void write_fixture(const std::filesystem::path& dir, TemplateId id, const std::string& subject,
                   std::string_view prompt, const std::string& completion) {
  Json doc{{"schema_version", kSchemaVersion},
           {"template_id", std::string(to_string(id))},
           {"subject", subject},
           {"input_sha256", sha256_hex(prompt)},
           {"completion", completion}};
  write_json_file(fixture_path(dir, id, prompt), doc);
}

}  // namespace skillroute
