#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ergm::cli {

inline constexpr const char *kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kInvalidInput = 2,
  kResourceLimit = 3,
  kNonConvergence = 4,
};

/// Parses args (without the program name), runs the subcommand, writes its
/// outputs and one run manifest. Diagnostics go to err, small results to out.
int dispatch(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
std::string file_digest(const std::string &path);

} // namespace ergm::cli
