#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace skillroute {

enum class ErrorKind {
  validation,       // malformed or out-of-range input data
  domain,           // arithmetic precondition violated
  config,           // bad run configuration
  infeasible,       // budget cannot cover the cheapest plan
  endpoint,         // transport or HTTP failure talking to the completion endpoint
  parse,            // completion text could not be parsed
  fixture_miss,     // offline fixture not found
  template_binding, // prompt placeholder left unbound
  integrity,        // explanation log slice does not match its digest
  incomplete,       // trace or profile is missing required parts
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::vector<std::string> details = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::vector<std::string>& details() const noexcept { return details_; }
  bool retryable() const noexcept { return kind_ == ErrorKind::endpoint; }

 private:
  ErrorKind kind_;
  std::vector<std::string> details_;
};

/// Process exit code for the CLI: 2 validation-type failures, 3 infeasible
/// budget, 4 endpoint failure, 1 anything else.
int exit_code_for(ErrorKind kind);

}  // namespace skillroute
