#pragma once

#include <iosfwd>

namespace bannerscope::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;

/// Subcommands: crawl, scan, cluster, train, analyze, label, serve.
/// Returns 0 on success, 1 on a usage error, 2 on an IO error.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace bannerscope::cli
