#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dynperc {

inline constexpr const char* kToolVersion = "0.1.0";

// Entry point behind the dynperc binary. `args` is the command line without
// the program name; one subcommand among {simulate, structure, couple, mix,
// anatomy, oracle} is required. Results go to files in the resolved output
// directory (--out, else $DYNPERC_OUT_DIR, else the working directory), all
// written atomically (write-then-rename) with a '#'-prefixed metadata header
// carrying the tool version, the resolved config and the master seed.
// Identical arguments produce identical output bytes; the wall time is
// reported on `err` only, never inside a file. Returns the process exit code:
// 0 on success, nonzero with a usage message on unknown flags or invalid
// parameter combinations.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace dynperc
