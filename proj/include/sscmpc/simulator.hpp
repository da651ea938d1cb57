#pragma once

#include <cstdint>
#include <vector>

#include "sscmpc/ocp.hpp"
#include "sscmpc/task.hpp"
#include "sscmpc/types.hpp"
#include "sscmpc/vehicle_model.hpp"

namespace sscmpc {

struct TvScript {
    bool lane_change = false;
    int to_lane = 1;
    int at_step = 1;  // reference switches lanes from this step on
};

struct TvSpec {
    AgentState initial;
    double v_ref = 27.0;
    TvScript script;
};

/// Behavior-prior parameters for one phase of an episode.
struct PhaseParams {
    double p_lc = 0.20;
    double p_acc = 0.10;
    double p_brk = 0.10;
    double beta_ta = 0.95;
};

struct ScenarioConfig {
    RoadGeometry road;
    double vehicle_length = 6.0;
    double vehicle_width = 2.0;
    AgentState ev_initial{0.0, 27.0, 3.5, 0.0};
    double ev_v_ref = 27.0;
    std::vector<TvSpec> tvs;
    int n_steps = 100;
    double dt = 0.2;
    int phase1_steps = 20;  // behavior-prediction initialization phase
    PhaseParams phase1{0.80, 0.40, 0.40, 0.999};
    PhaseParams phase2{0.20, 0.10, 0.10, 0.95};
    double execution_noise_scale = 1.0;    // scales w_ex realizations
    double measurement_noise_scale = 1.0;  // scales position measurement noise
    std::uint64_t seed = 1;
};

/// The fixed five-vehicle highway scenario: EV in the center lane, a slowing
/// lead vehicle ahead, a faster vehicle approaching in the left lane, two
/// vehicles in the right lane, and one vehicle merging to the center lane.
ScenarioConfig table1_scenario();

struct StepRecord {
    int step = 0;
    int phase = 1;
    PhaseParams phase_params;
    AgentState ev;                       // state before applying the input
    std::vector<AgentState> tvs;         // true states before the step
    std::vector<AgentState> tvs_measured;
    std::vector<int> sample_counts;      // K per TV
    AgentState ev_ref;                   // controller reference at this step
    AgentInput input;                    // applied input
    OcpStatus status = OcpStatus::Optimal;
    double slack_total = 0.0;
    int scp_iterations = 0;
    bool collision = false;              // at the post-step state
};

struct EpisodeTrace {
    std::vector<StepRecord> steps;
    AgentState ev_final;
    std::vector<AgentState> tvs_final;
    double j100 = 0.0;
    bool collided = false;
    int infeasible_ocp_steps = 0;
    int infeasible_recovery_steps = 0;
    int road_departure_steps = 0;
    std::uint64_t seed = 0;
};

struct McReport {
    int runs = 0;
    int collisions = 0;  // number of runs containing at least one collision step
    double mean_j100 = 0.0;
    double mean_infeasible_ocp_steps = 0.0;
    double mean_infeasible_recovery_steps = 0.0;
    std::vector<std::uint64_t> run_seeds;
};

struct McResult {
    McReport report;
    std::vector<EpisodeTrace> traces;
};

/// Axis-aligned rectangle overlap between vehicle footprints; boundary
/// contact does not count as a collision.
bool check_collision(const AgentState& ev, const std::vector<AgentState>& tvs,
                     double vehicle_length, double vehicle_width);

EpisodeTrace run_episode(const ScenarioConfig& scenario, const OcpConfig& controller,
                         std::uint64_t seed);

/// Recomputes the realized closed-loop cost from a stored trace; must agree
/// with the live accumulator.
double closed_loop_cost(const EpisodeTrace& trace, const Mat4& Q, const Mat2& R);

/// Independent episodes on seed substreams derive_seed(base_seed, {run}),
/// optionally in parallel; aggregation is ordered by run index.
McResult monte_carlo(const ScenarioConfig& scenario, const OcpConfig& controller, int n_runs,
                     std::uint64_t base_seed, int threads = 1);

/// Random five-vehicle setting: uniform positions in [-150, 150], random
/// lanes, constant velocity targets in [17, 27]; resampled until same-lane
/// pairs keep >= 50 m spacing with non-approaching velocity ordering.
ScenarioConfig random_scenario(std::uint64_t seed);

}  // namespace sscmpc
