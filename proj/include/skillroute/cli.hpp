#pragma once

#include <iosfwd>

namespace skillroute {

/// Entry point behind the skillroute binary. Returns the process exit code:
/// 0 success, 2 invalid input or configuration, 3 infeasible budget,
/// 4 completion endpoint failure, 1 anything unexpected.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace skillroute
