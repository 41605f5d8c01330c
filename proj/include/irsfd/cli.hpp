#pragma once

#include <ostream>

namespace irsfd {

/// Command-line entry point. Subcommands: converge, sweep, oracle, defaults.
/// Returns 0 on success, 1 on runtime failure and 2 on configuration or
/// usage errors.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace irsfd
