#pragma once
// Command dispatch shared by the CLI: every subcommand is a pure function of
// a RunConfig writing human-readable results to `out` (and CSV to the path in
// the config, when one is set).

#include <iosfwd>
#include <string>

#include "mcair/config.hpp"

namespace mcair {

// cir | memory | transitions | mi | capacity | sweep | surface | simulate | validate
// Returns a process exit status (0 = success, 1 = failure/validation reject).
int run_command(const std::string& command, const RunConfig& cfg,
                std::ostream& out, std::ostream& err);

}  // namespace mcair
