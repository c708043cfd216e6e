#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wcpd::cli {

enum ExitCode : int
{
  kOk = 0,
  kUsage = 1,
  kStepsize = 2,
  kIo = 3,
  kUnknown = 4,
};

/// Runs the tool on argv-style arguments (without the program name).
int run(std::vector<std::string> args, std::ostream &out, std::ostream &err);

/// Reads key=value lines; blank lines and '#' comments are skipped.
std::vector<std::pair<std::string, std::string>> read_config(std::string const &path);

/// Replaces `--config FILE` by the file's entries as `--key value` pairs,
/// placed before the command-line flags so that those take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args);

} // namespace wcpd::cli
