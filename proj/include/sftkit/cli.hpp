#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sft::cli {

/// Exit codes: 0 verdict computed, 1 a check failed, 2 usage or parse error.
enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2 };

/// Runs one subcommand (validate, d2, apply, find-primitive, lift, project, classify,
/// enumerate, corpus). args excludes the program name. The JSON report goes to `out`
/// unless --report names a file; diagnostics go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sft::cli
