#pragma once

#include <iosfwd>
#include <string>

#include "offsetsim/run_config.hpp"

namespace offsetsim {

// Subcommand drivers. Each throws (ConfigError / DataError / TransportError)
// on failure; the CLI maps exceptions to a nonzero exit status.

// Runs the no-decoy + full-grid sweep for every configured segment and writes
// tallies, probabilities, deltas, cell selections, heatmap grids, predicted
// groups, and the run manifest under paths.output_dir.
void command_simulate(const RunConfig& cfg, std::ostream& log);

// Ingests the respondent file, runs the hypothesis battery and the
// exploratory analyses, and writes JSON/CSV/markdown reports.
void command_analyze(const RunConfig& cfg, std::ostream& log);

// Emits the annual CO2 accounting table.
void command_impact(const RunConfig& cfg, std::ostream& log);

// Writes the segment list and decoy grid CSVs.
void command_export_grid(const RunConfig& cfg, std::ostream& log);

// Validates the resolved configuration and prints a summary.
void command_validate(const RunConfig& cfg, std::ostream& log);

}  // namespace offsetsim
