#pragma once

#include <map>

#include "sscmpc/task.hpp"
#include "sscmpc/types.hpp"

namespace sscmpc {

/// Elliptic exclusion region around an obstacle; the safe set is its exterior.
struct SafetyEllipse {
    double cx = 0.0;
    double cy = 0.0;
    double a = 30.0;
    double b = 2.0;
};

/// One linearized, probabilistically tightened safety constraint
/// d(xi, center) >= gamma at a prediction step.
struct TightenedConstraint {
    SafetyEllipse ellipse;
    double gamma = 0.0;
    RowVec4 grad_do = RowVec4::Zero();  // d(d)/d(obstacle state) at the nominal pair
    int step = 0;                       // prediction step k (1-based)
    int obstacle_id = 0;
    int sample_id = 0;                  // -1 when constraints are aggregated
};

/// d = (x-cx)^2/a^2 + (y-cy)^2/b^2 - 1; nonnegative outside the ellipse.
double ellipse_value(const AgentState& ev, double cx, double cy, double a, double b);

inline double ellipse_value(const AgentState& ev, const SafetyEllipse& e) {
    return ellipse_value(ev, e.cx, e.cy, e.a, e.b);
}

/// Gradient of d with respect to the obstacle state [x, vx, y, vy]; the
/// obstacle position enters d with sign opposite to the agent's, and the
/// velocity components do not enter at all.
RowVec4 ellipse_gradient_do(const AgentState& ev, const AgentState& do_nominal, double a, double b);

/// Analytic tightening margin gamma = sqrt(2 grad Sigma grad^T) *
/// erfinv(2 beta_ex - 1) for execution risk beta_ex in [0.5, 1). The margin
/// is nonnegative and grows with beta_ex so that d >= gamma tightens the
/// constraint as the accepted risk shrinks.
double tightening_gamma(const RowVec4& grad_do, const Mat4& sigma_e, double beta_ex);

/// Single ellipse covering the nominal obstacle positions of the sampled
/// maneuvers at one step: center at the per-axis means, axes grown by half
/// the positional spread (plus the lateral coupling term on the major axis).
SafetyEllipse aggregate_ellipse(const std::map<LongitudinalManeuver, double>& x_by_maneuver,
                                const std::map<LateralManeuver, double>& y_by_maneuver,
                                double a, double b, double l_lane);

/// Convenience overload over joint-task positions (x, y).
SafetyEllipse aggregate_ellipse(const std::map<Task, std::pair<double, double>>& positions,
                                double a, double b, double l_lane);

}  // namespace sscmpc
