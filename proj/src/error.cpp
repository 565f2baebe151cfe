#include "skillroute/error.hpp"

namespace skillroute {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::domain: return "domain";
    case ErrorKind::config: return "config";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::endpoint: return "endpoint";
    case ErrorKind::parse: return "parse";
    case ErrorKind::fixture_miss: return "fixture-miss";
    case ErrorKind::template_binding: return "template";
    case ErrorKind::integrity: return "integrity";
    case ErrorKind::incomplete: return "incomplete";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::vector<std::string> details)
    : std::runtime_error(message), kind_(kind), details_(std::move(details)) {}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation:
    case ErrorKind::domain:
    case ErrorKind::config:
    case ErrorKind::parse:
    case ErrorKind::template_binding:
    case ErrorKind::integrity:
    case ErrorKind::incomplete:
    case ErrorKind::fixture_miss:
      return 2;
    case ErrorKind::infeasible:
      return 3;
    case ErrorKind::endpoint:
      return 4;
  }
  return 1;
}

}  // namespace skillroute
