#pragma once

#include <string>
#include <vector>

namespace curveflow {

/// Exit codes of the command-line driver.
enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitNumerical = 3 };

/// Entry point for `curveflow <subcommand> ...`; args excludes the program name.
/// Subcommands: run, ladder, radial, properties, monitors, report.
int run_cli(const std::vector<std::string>& args);

}  // namespace curveflow
