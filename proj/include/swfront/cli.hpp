#pragma once

#include <iosfwd>

namespace swfront {

/// Runs one CLI invocation. Exit codes: 0 success, 2 input or usage error,
/// 3 numerical failure or failed validation. Errors go to `err` as JSON.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace swfront
