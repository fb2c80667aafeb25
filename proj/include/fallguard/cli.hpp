#pragma once

namespace fallguard {

// Subcommands: process, synth, eval. Exit codes: 0 success, 1 validation
// error (flags, config, malformed inputs), 2 processing error.
int run_cli(int argc, const char* const* argv);

}  // namespace fallguard
