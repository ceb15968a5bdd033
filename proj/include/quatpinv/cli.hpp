#pragma once

// Benchmark command line: pinv-bench, rsp-bench, cur-complete, lorenz,
// deblur and recurrence-check. Results are CSV rows on --out (default stdout).

#include <ostream>

namespace quatpinv {

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

/// Parses argv and runs one subcommand. Diagnostics go to `err`, CSV to `out`
/// unless --out names a file.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "app,param-set,iters,wall_s,psnr_db,residual"
const char* app_csv_header();

}  // namespace quatpinv
