#pragma once

#include <string>

#include "sscmpc/config.hpp"

namespace sscmpc {

/// Runs the full sweep described by the spec and writes report.csv, per-run
/// trace_<i>.csv files for the first sweep combination, and summary.svg to
/// the output directory. Throws ConfigError / IoError; never exits the
/// process.
void run_experiment(const ExperimentSpec& spec);

/// Worker count resolution: requested value (0 = auto), capped by the
/// SSC_MPC_THREADS environment variable when set (0 = auto there as well).
int resolve_threads(int requested);

}  // namespace sscmpc
