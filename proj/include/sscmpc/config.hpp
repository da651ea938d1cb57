#pragma once

#include <string>
#include <vector>

#include "sscmpc/ocp.hpp"
#include "sscmpc/simulator.hpp"

namespace sscmpc {

enum class ScenarioSource { Table1, Random, File };

/// One experiment: a scenario source, a controller mode, risk-parameter
/// sweeps, and output settings. Defaults reproduce the fixed five-vehicle
/// highway study.
struct ExperimentSpec {
    ScenarioSource source = ScenarioSource::Table1;
    std::string scenario_path;
    ControllerMode mode = ControllerMode::SSC;
    std::vector<double> beta_ta_sweep = {0.99, 0.95, 0.89, 0.83};
    std::vector<double> beta_ex_sweep = {0.8};
    int n_runs = 150;
    std::uint64_t base_seed = 1;
    std::string out_dir = "out";
    int threads = 0;  // 0 = auto; SSC_MPC_THREADS caps
    OcpConfig controller;
    ScenarioConfig scenario;  // base scenario (road, phases, EV); TVs from source

    void validate() const;  // throws ConfigError
};

/// Flat key = value format, `#` comments, comma-separated lists. Unknown
/// keys, malformed values, and invariant violations raise ConfigError with
/// the line number.
ExperimentSpec parse_config(const std::string& text);

/// Scenario description in the same key = value format (ev_initial, repeated
/// tv lines, phases, step counts).
ScenarioConfig parse_scenario(const std::string& text);

std::string read_text_file(const std::string& path);  // IoError on failure

}  // namespace sscmpc
