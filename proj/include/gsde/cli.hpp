#pragma once

namespace gsde::cli {

// Entry point for the gsde tool. Returns the process exit code: 0 success,
// 2 configuration or usage error, 3 solver blow-up, 4 compatibility failure,
// 5 patch conflict, 1 anything else.
int run_cli(int argc, char** argv);

}  // namespace gsde::cli
