#pragma once

namespace hlsgen {

// Full command-line tool: parses arguments, runs the requested subcommand,
// and returns the process exit code:
//   0 success, 1 usage error, 2 input/source error, 3 internal error.
int run_cli(int argc, const char* const* argv);

} // namespace hlsgen
