#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flexport {

// Exit codes of run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // input, validation or solve error
inline constexpr int kExitUsage = 2;    // unknown flag, missing argument
inline constexpr int kExitPartial = 3;  // run finished with failed cells

/// Entry point of the flexport command line:
///   validate <system> [--timeseries DIR]
///   run <config> [--output DIR] [--workers N]
///   report <artifact> [--format csv|json|table]
///   lpwrite <config> --cell <tau,Q> <path>
/// Errors go to `err` as one JSON object per line:
///   {"error":"<kind>","message":"...", ...}
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flexport
