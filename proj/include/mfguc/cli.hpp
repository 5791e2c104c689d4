#pragma once

#include <iosfwd>

namespace mfguc::cli {

enum ExitCode : int { ok = 0, numerical_failure = 1, config_invalid = 2 };

/// Entry point of the mfguc binary. Subcommands: solve, carleman, uc,
/// sweep-t0, mms. Output directory precedence: --output-dir, then
/// MFGUC_OUTPUT_DIR, then run.output_dir.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mfguc::cli
