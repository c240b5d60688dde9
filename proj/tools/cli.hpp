#pragma once

#include <ostream>

namespace proot::cli {

enum ExitCode : int {
  kOk = 0,
  kBadFlags = 1,
  kNoConvergence = 2,
  kIoError = 3,
};

/// Entry point behind the `prootkit` executable; subcommands root, bench,
/// decompose and cost. Every flag can also come from PROOTKIT_<FLAG>.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace proot::cli
