#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lumamap {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitIo = 2,
  kExitProcessing = 3,
};

/// Entry point of the `lumamap` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lumamap
