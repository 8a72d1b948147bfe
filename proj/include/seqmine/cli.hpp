#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace seqmine::cli {

/// Exit statuses shared by all subcommands.
enum Exit : int {
  kOk = 0,
  kVerifyMismatch = 1,
  kMissingInput = 2,  // unreadable file, or an empty database where mining needs one
  kFormatError = 3,
  kBadParameter = 4,
  kCorruptInput = 5,  // pattern file not closed under prefixes
  kOracleLimit = 6,
};

/// Runs `seqmine <args...>`; args excludes the program name. Human summaries
/// go to `out`, diagnostics and timing to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// SHA-256 of a file's bytes, lowercase hex.
std::string file_digest(const std::string& path);

}  // namespace seqmine::cli
