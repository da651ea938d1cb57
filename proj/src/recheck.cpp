#include <algorithm>
#include <cmath>

#include "sscmpc/ocp.hpp"

namespace sscmpc {

double SolutionCheck::max_violation() const {
    return std::max({max_input_violation, max_rate_violation, max_lane_violation,
                     max_safety_violation});
}

// Deliberately re-derives everything step by step instead of reusing the
// condensed matrices, so solver bugs cannot hide behind shared code.
SolutionCheck verify_solution(const OcpProblem& problem, const OcpSolution& solution) {
    SolutionCheck check;
    const OcpBounds& bd = problem.cfg.bounds;
    const int n = problem.cfg.horizon;

    AgentState s = problem.ev0;
    AgentInput prev = problem.u_prev;
    std::vector<AgentState> states;
    states.reserve(n);
    for (int k = 0; k < n; ++k) {
        const AgentInput& u = solution.inputs[static_cast<std::size_t>(k)];
        check.max_input_violation = std::max({check.max_input_violation, u.ux - bd.ux_max,
                                              bd.ux_min - u.ux, u.uy - bd.uy_max,
                                              bd.uy_min - u.uy});
        check.max_rate_violation =
            std::max({check.max_rate_violation, (u.ux - prev.ux) - bd.dux_max,
                      bd.dux_min - (u.ux - prev.ux), (u.uy - prev.uy) - bd.duy_max,
                      bd.duy_min - (u.uy - prev.uy)});
        prev = u;

        const Vec4 next = problem.model.A * s.vec() + problem.model.B * u.vec();
        s = AgentState::from_vec(next);
        states.push_back(s);
        check.max_lane_violation =
            std::max({check.max_lane_violation, s.y - bd.y_max, bd.y_min - s.y});

        const Vec4 e = s.vec() - problem.refs[static_cast<std::size_t>(k)].vec();
        const Mat4& w = (k == n - 1) ? problem.cfg.S : problem.cfg.Q;
        check.recomputed_cost += e.dot(w * e) + u.vec().dot(problem.cfg.R * u.vec());
    }

    for (const TightenedConstraint& c : solution.constraints_used) {
        const AgentState& sk = states[static_cast<std::size_t>(c.step - 1)];
        const double dx = sk.x - c.ellipse.cx;
        const double dy = sk.y - c.ellipse.cy;
        const double d = dx * dx / (c.ellipse.a * c.ellipse.a) +
                         dy * dy / (c.ellipse.b * c.ellipse.b) - 1.0;
        check.max_safety_violation = std::max(check.max_safety_violation, c.gamma - d);
    }
    check.max_input_violation = std::max(0.0, check.max_input_violation);
    check.max_rate_violation = std::max(0.0, check.max_rate_violation);
    check.max_lane_violation = std::max(0.0, check.max_lane_violation);
    check.max_safety_violation = std::max(0.0, check.max_safety_violation);
    return check;
}

}  // namespace sscmpc
