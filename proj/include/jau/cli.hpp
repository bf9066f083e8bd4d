#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace jau {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitIo = 3,
};

/// Runs the command line `args` (args[0] is the program name) with
/// subcommands train, recover, sweep and bench. Results go to `out`,
/// diagnostics and usage text to `err`.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace jau
