#pragma once

#include <ostream>

#include "niche/config.hpp"

namespace niche {

/// Run the configured subcommand and write its artifacts under
/// config.output_dir. Returns 0, or 1 when a validation or comparison check
/// fails. Configuration and runtime problems are thrown.
int run(const RunConfig& config, std::ostream& log, bool quiet = false);

}  // namespace niche
