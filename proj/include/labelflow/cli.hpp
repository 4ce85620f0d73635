#pragma once

#include <iosfwd>

namespace labelflow {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitConfig = 3,
};

// Entry point behind the labelflow binary. Subcommands: synth, run,
// eval-tier1, eval-tier2, metrics, serve. Diagnostics go to `err` as
// "<Kind>: <message>".
int execute(int argc, const char* const argv[], std::ostream& out, std::ostream& err);

}  // namespace labelflow
