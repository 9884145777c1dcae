#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace llpauc::cli {

enum ExitCode : int { kOk = 0, kRuntime = 1, kUsage = 2, kCheckFailed = 3 };

/// Environment variable that supplies the output directory when --output-dir is absent.
inline constexpr const char* kOutputDirEnv = "LLPAUC_OUTPUT_DIR";

/// Runs one subcommand; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace llpauc::cli
