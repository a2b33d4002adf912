#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vocalpersona::cli {

enum ExitCode : int {
    ok = 0,
    validation_failure = 1,
    usage_error = 2,
    io_error = 3,
};

/// Runs `vpersona <args...>` (args excludes the program name). Tabular
/// output is CSV with a header row; diagnostics go to `err`.
///
/// Subcommands: validate, sample, synth, report, serve, init.
/// Common flags: --bundle PATH (default $PERSONA_BUNDLE), --persona ID,
/// --macro NAME=X (repeatable), --seed N, --out PATH.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest round-trip decimal form used in every CSV cell.
std::string format_number(double v);

}  // namespace vocalpersona::cli
