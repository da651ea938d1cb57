#include "sscmpc/ocp.hpp"

#include <algorithm>
#include <cmath>

namespace sscmpc {

OcpConfig::OcpConfig() {
    Q = Vec4(0.0, 3.0, 0.5, 0.1).asDiagonal();
    S = Q;
    R = Vec2(1.0, 0.1).asDiagonal();
}

int OcpProblem::num_safety_rows() const {
    int n = 0;
    for (const auto& pred : predictions)
        for (const auto& per_step : pred.constraints) n += static_cast<int>(per_step.size());
    return n;
}

std::vector<AgentState> OcpProblem::rollout(const std::vector<AgentInput>& inputs) const {
    std::vector<AgentState> states;
    states.reserve(inputs.size());
    AgentState s = ev0;
    for (const AgentInput& u : inputs) {
        s = step_agent(model, s, u);
        states.push_back(s);
    }
    return states;
}

double OcpProblem::tracking_cost(const std::vector<AgentInput>& inputs) const {
    const int n = cfg.horizon;
    const std::vector<AgentState> states = rollout(inputs);
    double cost = 0.0;
    for (int k = 0; k < n; ++k) {
        const Vec4 dxi = states[k].vec() - refs[k].vec();
        const Mat4& w = (k == n - 1) ? cfg.S : cfg.Q;
        cost += dxi.dot(w * dxi);
        cost += inputs[k].vec().dot(cfg.R * inputs[k].vec());
    }
    return cost;
}

OcpProblem build_problem(const AgentState& ev0, const AgentInput& u_prev,
                         std::vector<ObstaclePrediction> predictions,
                         const std::vector<AgentState>& refs, const LinearModel& model,
                         const OcpConfig& cfg) {
    const int n = cfg.horizon;
    if (n < 1) throw ConfigError("build_problem: horizon must be >= 1");
    if (static_cast<int>(refs.size()) != n)
        throw ConfigError("build_problem: reference length does not match horizon");
    for (const auto& pred : predictions) {
        if (static_cast<int>(pred.sigma_e.size()) != n ||
            static_cast<int>(pred.constraints.size()) != n)
            throw ConfigError("build_problem: prediction length does not match horizon");
        for (const auto& traj : pred.nominal)
            if (static_cast<int>(traj.size()) != n)
                throw ConfigError("build_problem: nominal trajectory length does not match horizon");
    }

    OcpProblem p;
    p.ev0 = ev0;
    p.u_prev = u_prev;
    p.predictions = std::move(predictions);
    p.refs = refs;
    p.model = model;
    p.cfg = cfg;

    const int nu = 2 * n;
    p.state_map.assign(n, Eigen::MatrixXd::Zero(4, nu));
    p.free_response.assign(n, Vec4::Zero());
    // xi_{k+1} = A xi_k + B u_k, condensed over the horizon
    for (int k = 0; k < n; ++k) {
        if (k == 0) {
            p.free_response[0] = model.A * ev0.vec();
        } else {
            p.free_response[k] = model.A * p.free_response[k - 1];
            p.state_map[k] = model.A * p.state_map[k - 1];
        }
        p.state_map[k].block<4, 2>(0, 2 * k) = model.B;
    }

    p.hessian = Eigen::MatrixXd::Zero(nu, nu);
    p.gradient = Eigen::VectorXd::Zero(nu);
    p.cost_constant = 0.0;
    for (int k = 0; k < n; ++k) {
        const Mat4& w = (k == n - 1) ? cfg.S : cfg.Q;
        const Vec4 e = p.free_response[k] - refs[k].vec();
        p.hessian.noalias() += 2.0 * p.state_map[k].transpose() * w * p.state_map[k];
        p.gradient.noalias() += 2.0 * p.state_map[k].transpose() * (w * e);
        p.cost_constant += e.dot(w * e);
        p.hessian.block<2, 2>(2 * k, 2 * k) += 2.0 * cfg.R;
    }

    // input box, input rate, and lane-keeping rows (fixed across linearizations)
    const OcpBounds& bd = cfg.bounds;
    const int rows = 4 * n + 4 * n + 2 * n;
    p.a_fixed = Eigen::MatrixXd::Zero(rows, nu);
    p.b_fixed = Eigen::VectorXd::Zero(rows);
    int r = 0;
    for (int k = 0; k < n; ++k) {
        p.a_fixed(r, 2 * k) = 1.0;
        p.b_fixed(r++) = bd.ux_max;
        p.a_fixed(r, 2 * k) = -1.0;
        p.b_fixed(r++) = -bd.ux_min;
        p.a_fixed(r, 2 * k + 1) = 1.0;
        p.b_fixed(r++) = bd.uy_max;
        p.a_fixed(r, 2 * k + 1) = -1.0;
        p.b_fixed(r++) = -bd.uy_min;
    }
    for (int k = 0; k < n; ++k) {
        const double px = (k == 0) ? u_prev.ux : 0.0;
        const double py = (k == 0) ? u_prev.uy : 0.0;
        p.a_fixed(r, 2 * k) = 1.0;
        if (k > 0) p.a_fixed(r, 2 * (k - 1)) = -1.0;
        p.b_fixed(r++) = bd.dux_max + px;
        p.a_fixed(r, 2 * k) = -1.0;
        if (k > 0) p.a_fixed(r, 2 * (k - 1)) = 1.0;
        p.b_fixed(r++) = -bd.dux_min - px;
        p.a_fixed(r, 2 * k + 1) = 1.0;
        if (k > 0) p.a_fixed(r, 2 * (k - 1) + 1) = -1.0;
        p.b_fixed(r++) = bd.duy_max + py;
        p.a_fixed(r, 2 * k + 1) = -1.0;
        if (k > 0) p.a_fixed(r, 2 * (k - 1) + 1) = 1.0;
        p.b_fixed(r++) = -bd.duy_min - py;
    }
    for (int k = 0; k < n; ++k) {
        p.a_fixed.row(r) = p.state_map[k].row(2);
        p.b_fixed(r++) = bd.y_max - p.free_response[k](2);
        p.a_fixed.row(r) = -p.state_map[k].row(2);
        p.b_fixed(r++) = p.free_response[k](2) - bd.y_min;
    }

    return p;
}

namespace {

/// Linearized safety rows at the given EV trajectory. The ellipse value is
/// convex in the EV position, so its first-order model under-estimates d and
/// the resulting half-space is an inner approximation of the safe exterior.
struct SafetyRows {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    std::vector<TightenedConstraint> constraints;
};

SafetyRows build_safety_rows(const OcpProblem& p, const std::vector<AgentState>& lin_traj,
                             double beta_ex) {
    const int n = p.cfg.horizon;
    const int nu = 2 * n;
    const bool analytic = p.cfg.mode != ControllerMode::ScmpcOnly;

    SafetyRows out;
    const int total = p.num_safety_rows();
    out.A = Eigen::MatrixXd::Zero(total, nu);
    out.b = Eigen::VectorXd::Zero(total);
    out.constraints.reserve(total);

    int r = 0;
    for (const auto& pred : p.predictions) {
        for (int k = 0; k < n; ++k) {
            for (const TightenedConstraint& geom : pred.constraints[k]) {
                const SafetyEllipse& e = geom.ellipse;
                double lx = lin_traj[k].x;
                double ly = lin_traj[k].y;
                double gx = 2.0 * (lx - e.cx) / (e.a * e.a);
                double gy = 2.0 * (ly - e.cy) / (e.b * e.b);
                if (std::abs(gx) + std::abs(gy) < 1e-9) {
                    // linearization point at the ellipse center: nudge laterally
                    const double dir = (ly >= e.cy) ? 1.0 : -1.0;
                    ly += 1e-3 * dir;
                    gy = 2.0 * (ly - e.cy) / (e.b * e.b);
                }

                TightenedConstraint c = geom;
                c.grad_do << -gx, 0.0, -gy, 0.0;
                c.gamma = analytic
                              ? tightening_gamma(c.grad_do, pred.sigma_e[k], beta_ex)
                              : 0.0;

                const AgentState lin_state{lx, 0.0, ly, 0.0};
                const double d_lin = ellipse_value(lin_state, e);
                // d_lin + gx (x - lx) + gy (y - ly) >= gamma
                const double rhs_req = c.gamma - d_lin + gx * lx + gy * ly;
                out.A.row(r) = -(gx * p.state_map[k].row(0) + gy * p.state_map[k].row(2));
                out.b(r) = -rhs_req + gx * p.free_response[k](0) + gy * p.free_response[k](2);
                out.constraints.push_back(c);
                ++r;
            }
        }
    }
    return out;
}

std::vector<AgentInput> unstack_inputs(const Eigen::VectorXd& u, int n) {
    std::vector<AgentInput> inputs(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) inputs[k] = AgentInput{u(2 * k), u(2 * k + 1)};
    return inputs;
}

std::vector<AgentState> cold_start_trajectory(const OcpProblem& p) {
    // constant-velocity rollout (zero input)
    std::vector<AgentState> traj;
    traj.reserve(p.cfg.horizon);
    AgentState s = p.ev0;
    for (int k = 0; k < p.cfg.horizon; ++k) {
        s = step_agent(p.model, s, AgentInput{});
        traj.push_back(s);
    }
    return traj;
}

/// Solves one convex subproblem; returns false when the QP is certified
/// infeasible. A non-converged but feasible iterate is accepted.
bool solve_subproblem(const QpProblem& qp, const Eigen::VectorXd& warm, Eigen::VectorXd& x_out) {
    QpResult r = solve_qp(qp, {}, &warm);
    if (r.status == QpStatus::Optimal) {
        x_out = r.x;
        return true;
    }
    if (r.status == QpStatus::MaxIterations && qp_violation(qp, r.x) <= 1e-7) {
        x_out = r.x;
        return true;
    }
    if (feasibility_gap(qp.A, qp.b) > 1e-7) return false;
    r = solve_qp(qp, {}, nullptr);
    if (r.status == QpStatus::Optimal ||
        (r.status == QpStatus::MaxIterations && qp_violation(qp, r.x) <= 1e-6)) {
        x_out = r.x;
        return true;
    }
    return false;
}

OcpSolution finish_solution(const OcpProblem& p, const Eigen::VectorXd& u, OcpStatus status,
                            double slack_total, int iterations, bool converged,
                            std::vector<TightenedConstraint> constraints) {
    OcpSolution sol;
    sol.inputs = unstack_inputs(u, p.cfg.horizon);
    sol.states = p.rollout(sol.inputs);
    sol.objective = p.tracking_cost(sol.inputs);
    sol.status = status;
    sol.slack_total = slack_total;
    sol.solver_iterations = iterations;
    sol.converged = converged;
    sol.constraints_used = std::move(constraints);
    double viol = 0.0;
    for (const TightenedConstraint& c : sol.constraints_used) {
        const double d = ellipse_value(sol.states[c.step - 1], c.ellipse);
        viol = std::max(viol, c.gamma - d);
    }
    sol.max_violation = std::max(0.0, viol);
    return sol;
}

}  // namespace

OcpSolution solve(const OcpProblem& p, const std::vector<AgentInput>* warm_start) {
    const int n = p.cfg.horizon;
    const int nu = 2 * n;

    Eigen::VectorXd u = Eigen::VectorXd::Zero(nu);
    std::vector<AgentState> lin_traj;
    if (warm_start && static_cast<int>(warm_start->size()) == n) {
        for (int k = 0; k < n; ++k) {
            u(2 * k) = (*warm_start)[k].ux;
            u(2 * k + 1) = (*warm_start)[k].uy;
        }
        lin_traj = p.rollout(*warm_start);
    } else {
        lin_traj = cold_start_trajectory(p);
    }

    const bool has_safety = p.num_safety_rows() > 0;
    std::vector<TightenedConstraint> last_constraints;
    int iter = 0;
    bool converged = false;
    while (iter < p.cfg.scp_max_iterations) {
        SafetyRows rows = build_safety_rows(p, lin_traj, p.cfg.beta_ex);

        QpProblem qp;
        qp.P = p.hessian;
        qp.q = p.gradient;
        qp.A = Eigen::MatrixXd(p.a_fixed.rows() + rows.A.rows(), nu);
        qp.A << p.a_fixed, rows.A;
        qp.b = Eigen::VectorXd(p.b_fixed.size() + rows.b.size());
        qp.b << p.b_fixed, rows.b;

        Eigen::VectorXd u_new;
        if (!solve_subproblem(qp, u, u_new)) {
            OcpSolution sol;
            sol.status = OcpStatus::Infeasible;
            sol.solver_iterations = iter + 1;
            return sol;
        }
        ++iter;
        last_constraints = std::move(rows.constraints);

        const double du = (u_new - u).cwiseAbs().maxCoeff();
        u = u_new;
        lin_traj = p.rollout(unstack_inputs(u, n));
        if (du < p.cfg.scp_input_tol || !has_safety) {
            converged = true;
            break;
        }
    }

    return finish_solution(p, u, OcpStatus::Optimal, 0.0, iter, converged,
                           std::move(last_constraints));
}

OcpSolution solve_recovery(const OcpProblem& p, const std::vector<AgentInput>* warm_start) {
    const int n = p.cfg.horizon;
    const int nu = 2 * n;
    const int ns = p.num_safety_rows();

    Eigen::VectorXd z = Eigen::VectorXd::Zero(nu + ns);
    std::vector<AgentState> lin_traj;
    if (warm_start && static_cast<int>(warm_start->size()) == n) {
        for (int k = 0; k < n; ++k) {
            z(2 * k) = (*warm_start)[k].ux;
            z(2 * k + 1) = (*warm_start)[k].uy;
        }
        lin_traj = p.rollout(*warm_start);
    } else {
        lin_traj = cold_start_trajectory(p);
    }

    // decision variable [U; s]: L1 slack penalty, safety rows soften to
    // d >= gamma - s, hard rows unchanged
    std::vector<TightenedConstraint> last_constraints;
    int iter = 0;
    bool converged = false;
    while (iter < p.cfg.scp_max_iterations) {
        SafetyRows rows = build_safety_rows(p, lin_traj, p.cfg.beta_ex_recovery);

        QpProblem qp;
        qp.P = Eigen::MatrixXd::Zero(nu + ns, nu + ns);
        qp.P.topLeftCorner(nu, nu) = p.hessian;
        qp.P.bottomRightCorner(ns, ns) = 1e-10 * Eigen::MatrixXd::Identity(ns, ns);
        qp.q = Eigen::VectorXd::Zero(nu + ns);
        qp.q.head(nu) = p.gradient;
        qp.q.tail(ns).setConstant(p.cfg.lambda_slack);

        const int m_fixed = static_cast<int>(p.a_fixed.rows());
        qp.A = Eigen::MatrixXd::Zero(m_fixed + 2 * ns, nu + ns);
        qp.b = Eigen::VectorXd::Zero(m_fixed + 2 * ns);
        qp.A.topLeftCorner(m_fixed, nu) = p.a_fixed;
        qp.b.head(m_fixed) = p.b_fixed;
        qp.A.block(m_fixed, 0, ns, nu) = rows.A;
        qp.A.block(m_fixed, nu, ns, ns) = -Eigen::MatrixXd::Identity(ns, ns);
        qp.b.segment(m_fixed, ns) = rows.b;
        qp.A.block(m_fixed + ns, nu, ns, ns) = -Eigen::MatrixXd::Identity(ns, ns);

        Eigen::VectorXd z_new;
        if (!solve_subproblem(qp, z, z_new)) {
            OcpSolution sol;
            sol.status = OcpStatus::InfeasibleRecoveryFailed;
            sol.solver_iterations = iter + 1;
            return sol;
        }
        ++iter;
        last_constraints = std::move(rows.constraints);

        const double du = (z_new.head(nu) - z.head(nu)).cwiseAbs().maxCoeff();
        z = z_new;
        lin_traj = p.rollout(unstack_inputs(z.head(nu), n));
        if (du < p.cfg.scp_input_tol || ns == 0) {
            converged = true;
            break;
        }
    }

    const double slack_total = ns > 0 ? z.tail(ns).cwiseMax(0.0).sum() : 0.0;
    return finish_solution(p, z.head(nu), OcpStatus::RecoveredWithSlack, slack_total, iter,
                           converged, std::move(last_constraints));
}

OcpSolution solve_with_recovery(const OcpProblem& p, const std::vector<AgentInput>* warm_start,
                                bool* hard_infeasible) {
    OcpSolution sol = solve(p, warm_start);
    if (hard_infeasible) *hard_infeasible = false;
    if (sol.status == OcpStatus::Infeasible) {
        if (hard_infeasible) *hard_infeasible = true;
        sol = solve_recovery(p, warm_start);
    }
    return sol;
}

ModePolicy baseline_mode_adjustments(const OcpConfig& cfg) {
    switch (cfg.mode) {
        case ControllerMode::SSC:
            return ModePolicy{true, true, false};
        case ControllerMode::SmpcOnly:
            return ModePolicy{false, true, false};
        case ControllerMode::ScmpcOnly:
            return ModePolicy{false, false, true};
    }
    throw DomainError("baseline_mode_adjustments: unknown mode");
}

std::vector<ObstaclePrediction> predict_obstacles(const std::vector<ObstacleInfo>& obstacles,
                                                  const RoadGeometry& road, const OcpConfig& cfg,
                                                  RandomStream* ctrl_rng) {
    const int n = cfg.horizon;
    const ModePolicy policy = baseline_mode_adjustments(cfg);
    const Task lane_keep{LateralManeuver::LK, LongitudinalManeuver::IA};

    std::vector<ObstaclePrediction> out;
    out.reserve(obstacles.size());

    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        const ObstacleInfo& ob = obstacles[i];
        ObstaclePrediction pred;
        pred.obstacle_id = static_cast<int>(i);

        if (policy.sample_tasks) {
            if (ob.samples.samples.empty())
                throw DomainError("predict_obstacles: obstacle has no sampled tasks");
            for (std::size_t j = 0; j < ob.samples.samples.size(); ++j) {
                const Task& t = ob.samples.samples[j];
                if (std::find(pred.tasks.begin(), pred.tasks.end(), t) == pred.tasks.end()) {
                    pred.tasks.push_back(t);
                    pred.sample_ids.push_back(static_cast<int>(j));
                }
            }
        } else {
            pred.tasks.push_back(lane_keep);
            pred.sample_ids.push_back(0);
        }

        if (policy.noise_scenarios) {
            // SCMPC baseline: execution noise approximated by drawn trajectories
            if (!ctrl_rng)
                throw DomainError("predict_obstacles: ScmpcOnly mode needs an rng");
            int k_ex = cfg.k_ex_override;
            if (k_ex <= 0) k_ex = std::max<int>(1, static_cast<int>(ob.samples.samples.size()));

            const auto refs = maneuver_reference(lane_keep, ob.measured, road, n,
                                                 cfg.maneuver_dv, cfg.maneuver_dv);
            pred.tasks.assign(static_cast<std::size_t>(k_ex), lane_keep);
            pred.sample_ids.resize(static_cast<std::size_t>(k_ex));
            pred.nominal.clear();
            const Eigen::LLT<Mat4> llt(ob.model.sigma_ex());
            for (int j = 0; j < k_ex; ++j) {
                pred.sample_ids[static_cast<std::size_t>(j)] = j;
                std::vector<AgentState> traj;
                traj.reserve(n);
                AgentState s = ob.measured;
                for (int k = 0; k < n; ++k) {
                    Vec4 w;
                    for (int d = 0; d < 4; ++d) w(d) = ctrl_rng->gaussian();
                    s = step_obstacle(ob.model, s, refs[k], llt.matrixL() * w);
                    traj.push_back(s);
                }
                pred.nominal.push_back(std::move(traj));
            }
            pred.aggregated = false;
        } else {
            for (const Task& t : pred.tasks) {
                const auto refs = maneuver_reference(t, ob.measured, road, n, cfg.maneuver_dv,
                                                     cfg.maneuver_dv);
                pred.nominal.push_back(nominal_trajectory(ob.model, ob.measured, refs));
            }
            pred.aggregated = cfg.aggregate_samples;
        }

        ErrorCovariance sigma{};
        pred.sigma_e.reserve(n);
        for (int k = 0; k < n; ++k) {
            sigma = propagate_covariance(ob.model, sigma);
            pred.sigma_e.push_back(sigma.sigma_e);
        }

        pred.constraints.assign(n, {});
        for (int k = 0; k < n; ++k) {
            if (pred.aggregated) {
                std::map<LongitudinalManeuver, double> xs;
                std::map<LateralManeuver, double> ys;
                for (std::size_t t = 0; t < pred.tasks.size(); ++t) {
                    xs[pred.tasks[t].longitudinal] = pred.nominal[t][k].x;
                    ys[pred.tasks[t].lateral] = pred.nominal[t][k].y;
                }
                TightenedConstraint c;
                c.ellipse = aggregate_ellipse(xs, ys, cfg.ellipse_a, cfg.ellipse_b, road.lane_width);
                c.step = k + 1;
                c.obstacle_id = pred.obstacle_id;
                c.sample_id = -1;
                pred.constraints[k].push_back(c);
            } else {
                for (std::size_t t = 0; t < pred.tasks.size(); ++t) {
                    TightenedConstraint c;
                    c.ellipse = SafetyEllipse{pred.nominal[t][k].x, pred.nominal[t][k].y,
                                              cfg.ellipse_a, cfg.ellipse_b};
                    c.step = k + 1;
                    c.obstacle_id = pred.obstacle_id;
                    c.sample_id = pred.sample_ids[t];
                    pred.constraints[k].push_back(c);
                }
            }
        }

        out.push_back(std::move(pred));
    }
    return out;
}

}  // namespace sscmpc
