#include "sscmpc/vehicle_model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace sscmpc {

LinearModel LinearModel::point_mass(double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("point_mass: dt must be positive");
    LinearModel m;
    m.dt = dt;
    m.A << 1, dt, 0, 0,
           0, 1, 0, 0,
           0, 0, 1, dt,
           0, 0, 0, 1;
    m.B << 0.5 * dt * dt, 0,
           dt, 0,
           0, 0.5 * dt * dt,
           0, dt;
    return m;
}

int RoadGeometry::nearest_lane(double y) const {
    const double rel = (y - leftmost_center_y) / lane_width;
    int lane = static_cast<int>(std::lround(rel));
    return std::clamp(lane, 0, lanes - 1);
}

namespace {

bool symmetric_psd(const Eigen::MatrixXd& m, double tol = 1e-9) {
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    return es.eigenvalues().minCoeff() >= -tol;
}

}  // namespace

ObstacleModel::ObstacleModel(const LinearModel& model, const Mat4& G, const Mat24& K_fb,
                             const Mat4& sigma_ex, const Mat2& sigma_meas)
    : model_(model), G_(G), K_fb_(K_fb), sigma_ex_(sigma_ex), sigma_meas_(sigma_meas) {
    if (!symmetric_psd(sigma_ex_)) throw DomainError("ObstacleModel: sigma_ex not symmetric PSD");
    if (!symmetric_psd(sigma_meas_)) throw DomainError("ObstacleModel: sigma_meas not symmetric PSD");

    phi_ = model_.A + model_.B * K_fb_;

    // The reference carries no absolute-position target (K_fb's first column
    // is zero for any velocity-tracking gain), so x is a neutral integrator
    // of the velocity error and rho(Phi) = 1 is expected. Stability is
    // required on the tracked subspace [vx, y, vy] and no eigenvalue may lie
    // outside the unit circle.
    Eigen::EigenSolver<Mat4> full(phi_);
    const double rho_full = full.eigenvalues().cwiseAbs().maxCoeff();
    if (rho_full > 1.0 + 1e-9) throw DomainError("ObstacleModel: feedback not stabilizing (rho > 1)");

    Eigen::Matrix3d phi_sub;
    const int idx[3] = {1, 2, 3};  // vx, y, vy
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) phi_sub(r, c) = phi_(idx[r], idx[c]);
    Eigen::EigenSolver<Eigen::Matrix3d> sub(phi_sub);
    const double rho_sub = sub.eigenvalues().cwiseAbs().maxCoeff();
    if (rho_sub >= 1.0 - 1e-9)
        throw DomainError("ObstacleModel: feedback not stabilizing on tracked subspace");
}

ObstacleModel ObstacleModel::highway_default(double dt) {
    const LinearModel model = LinearModel::point_mass(dt);
    Mat4 G = Vec4(0.05, 0.067, 0.013, 0.03).asDiagonal();
    Mat24 K;
    K << 0, -1.0, 0, 0,
         0, 0, -0.8, -2.2;
    const Mat4 sigma_ex = Mat4::Identity();
    Mat2 sigma_meas = Vec2(0.16, 0.01).asDiagonal();
    return ObstacleModel(model, G, K, sigma_ex, sigma_meas);
}

AgentState step_agent(const LinearModel& model, const AgentState& state, const AgentInput& input) {
    return AgentState::from_vec(model.A * state.vec() + model.B * input.vec());
}

AgentInput feedback_input(const ObstacleModel& m, const AgentState& state, const AgentState& ref) {
    return AgentInput::from_vec(m.K_fb() * (state.vec() - ref.vec()));
}

AgentState step_obstacle(const ObstacleModel& m, const AgentState& state, const AgentState& ref,
                         const Vec4& w_ex) {
    const AgentInput u = feedback_input(m, state, ref);
    return AgentState::from_vec(m.model().A * state.vec() + m.model().B * u.vec() + m.G() * w_ex);
}

std::vector<AgentState> nominal_trajectory(const ObstacleModel& m, const AgentState& state0,
                                           const std::vector<AgentState>& refs) {
    if (refs.empty()) throw DomainError("nominal_trajectory: empty reference sequence");
    std::vector<AgentState> out;
    out.reserve(refs.size());
    AgentState s = state0;
    for (const AgentState& ref : refs) {
        s = step_obstacle(m, s, ref, Vec4::Zero());
        out.push_back(s);
    }
    return out;
}

ErrorCovariance propagate_covariance(const ObstacleModel& m, const ErrorCovariance& sigma_e) {
    Mat4 next = m.phi() * sigma_e.sigma_e * m.phi().transpose() +
                m.G() * m.sigma_ex() * m.G().transpose();
    // keep exact symmetry under accumulation
    next = 0.5 * (next + next.transpose()).eval();
    return ErrorCovariance{next};
}

std::vector<AgentState> maneuver_reference(const Task& task, const AgentState& current,
                                           const RoadGeometry& road, int n_steps,
                                           double dv_acc, double dv_brk) {
    if (n_steps < 1) throw DomainError("maneuver_reference: n_steps must be >= 1");

    const int lane = road.nearest_lane(current.y);
    int target_lane = lane;
    switch (task.lateral) {
        case LateralManeuver::LK: break;
        case LateralManeuver::LCL:
            if (lane == 0) throw InvalidManeuver("LCL from leftmost lane");
            target_lane = lane - 1;
            break;
        case LateralManeuver::LCR:
            if (lane == road.lanes - 1) throw InvalidManeuver("LCR from rightmost lane");
            target_lane = lane + 1;
            break;
    }

    double v_ref = current.vx;
    switch (task.longitudinal) {
        case LongitudinalManeuver::IA: break;
        case LongitudinalManeuver::AC: v_ref += dv_acc; break;
        case LongitudinalManeuver::BR: v_ref -= dv_brk; break;
    }

    AgentState ref{0.0, v_ref, road.lane_center(target_lane), 0.0};
    return std::vector<AgentState>(static_cast<std::size_t>(n_steps), ref);
}

}  // namespace sscmpc
