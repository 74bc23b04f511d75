#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "subproj/error.hpp"

namespace subproj {

enum ExitCode : int { kExitOk = 0, kExitMaxIter = 1, kExitSchema = 2, kExitNumeric = 3 };

/// Input and validation problems map to 2, numerical failures to 3.
int exit_code_for(ErrorKind kind);

/// Runs `subproj <args...>` (args exclude the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace subproj
