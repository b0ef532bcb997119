#pragma once

namespace bhv {

// Entry point behind the `bhv` binary; separated so tests can drive
// whole subcommand runs in-process. Returns the process exit code:
// 0 success, 1 partial or runtime failure, 2 invalid input/config.
int run_cli(int argc, const char* const* argv);

}  // namespace bhv
