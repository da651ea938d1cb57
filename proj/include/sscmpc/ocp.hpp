#pragma once

#include <optional>
#include <vector>

#include "sscmpc/chance_constraints.hpp"
#include "sscmpc/qp.hpp"
#include "sscmpc/task.hpp"
#include "sscmpc/types.hpp"
#include "sscmpc/vehicle_model.hpp"

namespace sscmpc {

enum class ControllerMode { SSC, SmpcOnly, ScmpcOnly };

struct OcpBounds {
    double y_min = -1.75, y_max = 8.75;
    double ux_min = -5.0, ux_max = 5.0;
    double uy_min = -0.5, uy_max = 0.5;
    double dux_min = -1.0, dux_max = 1.0;
    double duy_min = -0.2, duy_max = 0.2;
};

struct OcpConfig {
    int horizon = 12;
    Mat4 Q;  // stage state weight, x-position error excluded via Q(0,0) = 0
    Mat4 S;  // terminal state weight
    Mat2 R;  // input weight
    double beta_ta = 0.95;
    double beta_ex = 0.8;
    double lambda_slack = 50.0;
    double beta_ex_recovery = 0.995;
    OcpBounds bounds;
    ControllerMode mode = ControllerMode::SSC;
    bool aggregate_samples = true;  // one aggregated ellipse per (obstacle, step)
    double p1_override = 0.0;       // 0: least likely joint task feeds the sample-size rule
    int k_ex_override = 0;          // 0: noise-scenario count matches the task sample size
    double maneuver_dv = 2.0;       // AC/BR velocity offset in reference generation
    double ellipse_a = 30.0;
    double ellipse_b = 2.0;
    double scp_input_tol = 1e-4;
    int scp_max_iterations = 30;

    OcpConfig();
};

/// Per-obstacle prediction data for one OCP: nominal trajectories of the
/// sampled tasks, the propagated error covariances, and the safety-constraint
/// geometry per prediction step.
struct ObstaclePrediction {
    int obstacle_id = 0;
    bool aggregated = true;
    std::vector<Task> tasks;        // distinct sampled tasks (constraint generators)
    std::vector<int> sample_ids;    // originating sample index per task
    std::vector<std::vector<AgentState>> nominal;  // [task][k], k = 0..N-1 for steps 1..N
    std::vector<Mat4> sigma_e;                     // [k], prediction-error covariance at step k+1
    std::vector<std::vector<TightenedConstraint>> constraints;  // [k][constraint]
};

enum class OcpStatus { Optimal, Infeasible, RecoveredWithSlack, InfeasibleRecoveryFailed };

struct OcpSolution {
    std::vector<AgentInput> inputs;  // u_0 .. u_{N-1}
    std::vector<AgentState> states;  // xi_1 .. xi_N
    double objective = 0.0;          // quadratic tracking cost (slack penalty excluded)
    OcpStatus status = OcpStatus::Infeasible;
    double max_violation = 0.0;
    double slack_total = 0.0;
    int solver_iterations = 0;  // outer linearization iterations
    bool converged = false;
    std::vector<TightenedConstraint> constraints_used;  // final linearization snapshot

    bool feasible() const {
        return status == OcpStatus::Optimal || status == OcpStatus::RecoveredWithSlack;
    }
};

/// Condensed finite-horizon problem: decision variable is the stacked input
/// sequence, states are eliminated through the linear dynamics.
struct OcpProblem {
    AgentState ev0;
    AgentInput u_prev;
    std::vector<ObstaclePrediction> predictions;
    std::vector<AgentState> refs;  // EV reference for steps 1..N
    LinearModel model;
    OcpConfig cfg;

    // prediction matrices, steps 1..N
    std::vector<Eigen::MatrixXd> state_map;  // [k] 4 x 2N
    std::vector<Vec4> free_response;         // [k]
    Eigen::MatrixXd hessian;                 // P of the condensed QP
    Eigen::VectorXd gradient;                // q of the condensed QP
    double cost_constant = 0.0;
    Eigen::MatrixXd a_fixed;  // bounds + rate + lane rows
    Eigen::VectorXd b_fixed;

    int num_safety_rows() const;
    std::vector<AgentState> rollout(const std::vector<AgentInput>& inputs) const;
    double tracking_cost(const std::vector<AgentInput>& inputs) const;
};

OcpProblem build_problem(const AgentState& ev0, const AgentInput& u_prev,
                         std::vector<ObstaclePrediction> predictions,
                         const std::vector<AgentState>& refs, const LinearModel& model,
                         const OcpConfig& cfg);

/// Sequential convexification around the ellipse constraints; the linearized
/// half-spaces under-approximate the safe exterior, so every iterate is
/// feasible for the true constraints. Returns Optimal or Infeasible.
OcpSolution solve(const OcpProblem& problem,
                  const std::vector<AgentInput>* warm_start = nullptr);

/// Slack-softened safety constraints (L1 penalty, weight lambda_slack) with
/// the tightening recomputed at beta_ex_recovery. Returns RecoveredWithSlack
/// or InfeasibleRecoveryFailed.
OcpSolution solve_recovery(const OcpProblem& problem,
                           const std::vector<AgentInput>* warm_start = nullptr);

/// solve(), falling back to solve_recovery() when infeasible.
/// `hard_infeasible` reports whether the fallback was taken.
OcpSolution solve_with_recovery(const OcpProblem& problem,
                                const std::vector<AgentInput>* warm_start,
                                bool* hard_infeasible);

/// Controller-visible snapshot of one obstacle when building an OCP.
struct ObstacleInfo {
    ObstacleModel model;
    AgentState measured;
    SampleSet samples;  // drawn tasks (SSC mode); ignored by the baselines
};

/// Builds the per-obstacle predictions for the configured mode: nominal
/// rollouts per distinct sampled task, covariance propagation from zero, and
/// the per-step constraint geometry (aggregated ellipse by default). The rng
/// is consumed only in ScmpcOnly mode, which replaces analytic tightening by
/// k_ex drawn noise-realization trajectories per obstacle.
std::vector<ObstaclePrediction> predict_obstacles(const std::vector<ObstacleInfo>& obstacles,
                                                  const RoadGeometry& road, const OcpConfig& cfg,
                                                  RandomStream* ctrl_rng = nullptr);

struct ModePolicy {
    bool sample_tasks = true;        // draw tasks from the behavior prior
    bool analytic_tightening = true; // gamma from the Gaussian quantile
    bool noise_scenarios = false;    // constraints from drawn noise realizations
};

ModePolicy baseline_mode_adjustments(const OcpConfig& cfg);

/// Independent re-check of a solution against the true (non-linearized)
/// constraints; used by tests and the simulator's bookkeeping.
struct SolutionCheck {
    double max_input_violation = 0.0;
    double max_rate_violation = 0.0;
    double max_lane_violation = 0.0;
    double max_safety_violation = 0.0;  // max(0, gamma - d), slack not credited
    double recomputed_cost = 0.0;

    double max_violation() const;
};

SolutionCheck verify_solution(const OcpProblem& problem, const OcpSolution& solution);

}  // namespace sscmpc
