#pragma once

// Task orchestration: dispatches a parsed RunConfig to the numeric modules
// and writes the run artifacts (manifest echo, CSV tables, JSON summary)
// atomically into the output directory.

#include <string>

#include "axistable/config.hpp"

namespace axistable {

// Executes the configured task. Writes manifest.cfg, summary.json and the
// task's CSV files under config.out_dir. Throws gate_error when a stated
// hypothesis refuses the run (CLI exit 2) and numeric_error / config_error
// on failures (exit 1).
void run_task(const RunConfig& config);

}  // namespace axistable
