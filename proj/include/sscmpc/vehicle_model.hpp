#pragma once

#include <vector>

#include "sscmpc/task.hpp"
#include "sscmpc/types.hpp"

namespace sscmpc {

/// Discrete-time point-mass model: independent double integrators in x and y.
struct LinearModel {
    Mat4 A;
    Mat42 B;
    double dt = 0.2;

    static LinearModel point_mass(double dt);
};

/// Three parallel lanes; the leftmost lane center sits at y = 0 and y grows
/// toward the right lane.
struct RoadGeometry {
    int lanes = 3;
    double lane_width = 3.5;
    double leftmost_center_y = 0.0;

    double lane_center(int lane) const { return leftmost_center_y + lane * lane_width; }
    int nearest_lane(double y) const;
    double y_min() const { return leftmost_center_y - 0.5 * lane_width; }
    double y_max() const { return lane_center(lanes - 1) + 0.5 * lane_width; }
};

struct ErrorCovariance {
    Mat4 sigma_e = Mat4::Zero();
};

/// Obstacle dynamics: the shared point-mass model plus a noise input matrix,
/// a stabilizing reference-tracking feedback gain, and the execution /
/// measurement noise covariances.
class ObstacleModel {
public:
    ObstacleModel(const LinearModel& model, const Mat4& G, const Mat24& K_fb,
                  const Mat4& sigma_ex, const Mat2& sigma_meas);

    /// The configuration used throughout the highway study: diagonal noise
    /// gains diag(0.05, 0.067, 0.013, 0.03), velocity/lateral feedback
    /// [[0,-1,0,0],[0,0,-0.8,-2.2]], unit execution noise, and position
    /// measurement noise diag(0.16, 0.01).
    static ObstacleModel highway_default(double dt);

    const LinearModel& model() const { return model_; }
    const Mat4& G() const { return G_; }
    const Mat24& K_fb() const { return K_fb_; }
    const Mat4& sigma_ex() const { return sigma_ex_; }
    const Mat2& sigma_meas() const { return sigma_meas_; }
    const Mat4& phi() const { return phi_; }  // A + B*K_fb

private:
    LinearModel model_;
    Mat4 G_;
    Mat24 K_fb_;
    Mat4 sigma_ex_;
    Mat2 sigma_meas_;
    Mat4 phi_;
};

AgentState step_agent(const LinearModel& model, const AgentState& state, const AgentInput& input);

AgentInput feedback_input(const ObstacleModel& m, const AgentState& state, const AgentState& ref);

AgentState step_obstacle(const ObstacleModel& m, const AgentState& state, const AgentState& ref,
                         const Vec4& w_ex);

/// Forward rollout of the noise-free closed loop; element k is the nominal
/// prediction at step k+1.
std::vector<AgentState> nominal_trajectory(const ObstacleModel& m, const AgentState& state0,
                                           const std::vector<AgentState>& refs);

/// One step of the prediction-error covariance recursion
/// Sigma' = Phi Sigma Phi^T + G Sigma_ex G^T.
ErrorCovariance propagate_covariance(const ObstacleModel& m, const ErrorCovariance& sigma_e);

/// Piecewise-constant reference for a task: lateral target is the current or
/// adjacent lane center, longitudinal velocity target is the current speed
/// shifted by +/- dv for AC/BR. Throws InvalidManeuver for a lane change off
/// the road.
std::vector<AgentState> maneuver_reference(const Task& task, const AgentState& current,
                                           const RoadGeometry& road, int n_steps,
                                           double dv_acc = 2.0, double dv_brk = 2.0);

}  // namespace sscmpc
