#pragma once

#include <ostream>

namespace w2i {

/// Exit codes: 0 success, 1 usage or configuration error, 2 fatal run.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitFatal = 2;

/// Entry point for the `w2i` tool: run, eval, report, validate-fixtures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace w2i
