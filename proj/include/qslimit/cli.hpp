// Command-line front end. The tool binary is a thin wrapper around run_cli so
// tests can drive every subcommand in-process.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qslimit/tables.hpp"

namespace qslimit {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitVerifyFailed = 3,
  kExitExhausted = 4,
};

/// Environment variable naming the table cache directory.
inline constexpr const char* kCacheDirEnv = "QSLIMIT_CACHE_DIR";

/// --cache-dir, then $QSLIMIT_CACHE_DIR, then $XDG_CACHE_HOME/qslimit or
/// ~/.cache/qslimit. Empty when caching is disabled or no home is known.
std::optional<std::filesystem::path> resolve_cache_dir(const std::optional<std::string>& flag, bool disabled);

/// Predicted seconds to build the count tables for `levels` from scratch,
/// with the per-level cost modelled as a n^5 and a fitted on a small build.
double estimate_build_seconds(const std::vector<std::uint64_t>& levels, const BuildOptions& options = {});

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qslimit
