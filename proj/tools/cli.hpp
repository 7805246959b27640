#pragma once

#include <ostream>

namespace blicket::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kDataError = 2;

// Entry point for the `blicket` command. Output that is not written to
// --out goes to `out`; diagnostics go to `err`.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace blicket::cli
