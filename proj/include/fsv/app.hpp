#pragma once

#include <iosfwd>
#include <string>

#include "fsv/report.hpp"

namespace fsv {

enum ExitCode { kExitCertified = 0, kExitFailed = 1, kExitConfig = 2 };

// Runs one subcommand (bundle, tube, cone, smoothness) on a configuration.
RunReport execute(const RunConfig& cfg, const std::string& command, std::ostream* log = nullptr);

int exit_code(const RunReport& r);

int run_cli(int argc, char** argv);

}  // namespace fsv
