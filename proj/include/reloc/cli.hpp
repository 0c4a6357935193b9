#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace reloc::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kValidationError = 1, kRuntimeError = 2 };

// Entry point of the `reloctrack` binary. `args` excludes the program name.
// Machine output goes to files or `out`; diagnostics only to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace reloc::cli
