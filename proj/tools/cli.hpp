#pragma once

#include <iosfwd>

namespace tvar::cli {

enum ExitCode { kTrue = 0, kFalse = 1, kUnknown = 2, kUsage = 3 };

/// Runs the command line tool with the given arguments (argv[0] is the
/// program name). Output goes to `out` and diagnostics to `err`.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace tvar::cli
