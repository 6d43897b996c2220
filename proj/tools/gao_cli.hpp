#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gao::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kData = 3, kAcceptance = 4 };

/// Runs one command line (without the program name). Reports go to `out`,
/// diagnostics and warnings to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gao::cli
