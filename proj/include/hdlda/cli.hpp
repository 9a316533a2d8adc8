#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hdlda {

/// Exit statuses of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitVerifyFail = 3 };

/// Runs one subcommand. args excludes the program name. Normal output goes to
/// out unless --out names a file; diagnostics go to err.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv);

}  // namespace hdlda
