#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rfamado::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitData = 3,
  kExitNumeric = 4,
};

/// Runs one invocation; `args` excludes the program name. Reports go to
/// `out`, stage logs and the single-line error to `err`. Outputs are staged
/// and written only after the whole command succeeds, together with a JSON
/// run manifest.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rfamado::cli
