#pragma once

#include <iosfwd>

namespace thex {

enum ExitCode { kExitOk = 0, kExitGoalFailed = 1, kExitUsage = 2, kExitParse = 3, kExitTimeout = 4 };

// explore / prove / compare front end; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace thex
