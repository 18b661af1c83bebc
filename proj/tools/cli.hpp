#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tilesub::cli {

enum ExitCode : int { ok = 0, usage = 1, validation = 2, cap = 3, io = 4 };

/// Runs one `tilesub` invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tilesub::cli
