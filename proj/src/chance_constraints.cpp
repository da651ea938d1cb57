#include "sscmpc/chance_constraints.hpp"

#include <algorithm>
#include <cmath>

#include "sscmpc/erfinv.hpp"

namespace sscmpc {

double ellipse_value(const AgentState& ev, double cx, double cy, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("ellipse_value: axes must be positive");
    const double dx = ev.x - cx;
    const double dy = ev.y - cy;
    return dx * dx / (a * a) + dy * dy / (b * b) - 1.0;
}

RowVec4 ellipse_gradient_do(const AgentState& ev, const AgentState& do_nominal, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("ellipse_gradient_do: axes must be positive");
    const double dx = ev.x - do_nominal.x;
    const double dy = ev.y - do_nominal.y;
    RowVec4 g;
    g << -2.0 * dx / (a * a), 0.0, -2.0 * dy / (b * b), 0.0;
    return g;
}

double tightening_gamma(const RowVec4& grad_do, const Mat4& sigma_e, double beta_ex) {
    if (!(beta_ex >= 0.5) || !(beta_ex < 1.0))
        throw DomainError("tightening_gamma: beta_ex outside [0.5, 1)");
    const double variance = std::max(0.0, (grad_do * sigma_e * grad_do.transpose())(0, 0));
    return std::sqrt(2.0 * variance) * erf_inv(2.0 * beta_ex - 1.0);
}

SafetyEllipse aggregate_ellipse(const std::map<LongitudinalManeuver, double>& x_by_maneuver,
                                const std::map<LateralManeuver, double>& y_by_maneuver,
                                double a, double b, double l_lane) {
    if (x_by_maneuver.empty() || y_by_maneuver.empty())
        throw DomainError("aggregate_ellipse: empty maneuver position map");
    if (!(a > 0.0) || !(b > 0.0) || !(l_lane > 0.0))
        throw DomainError("aggregate_ellipse: a, b, l_lane must be positive");

    double x_sum = 0.0, x_min = 0.0, x_max = 0.0;
    bool first = true;
    for (const auto& [m, x] : x_by_maneuver) {
        x_sum += x;
        x_min = first ? x : std::min(x_min, x);
        x_max = first ? x : std::max(x_max, x);
        first = false;
    }
    double y_sum = 0.0, y_min = 0.0, y_max = 0.0;
    first = true;
    for (const auto& [m, y] : y_by_maneuver) {
        y_sum += y;
        y_min = first ? y : std::min(y_min, y);
        y_max = first ? y : std::max(y_max, y);
        first = false;
    }

    SafetyEllipse e;
    e.cx = x_sum / static_cast<double>(x_by_maneuver.size());
    e.cy = y_sum / static_cast<double>(y_by_maneuver.size());
    // Spreads over the sampled maneuvers only; with all three lateral and
    // longitudinal options present these are |x_AC - x_BR| and |y_LCL - y_LCR|.
    e.b = b + 0.5 * (y_max - y_min);
    e.a = a + 0.5 * (x_max - x_min) + (2.0 / l_lane) * (e.b - b);
    return e;
}

SafetyEllipse aggregate_ellipse(const std::map<Task, std::pair<double, double>>& positions,
                                double a, double b, double l_lane) {
    std::map<LongitudinalManeuver, double> xs;
    std::map<LateralManeuver, double> ys;
    for (const auto& [task, xy] : positions) {
        xs[task.longitudinal] = xy.first;
        ys[task.lateral] = xy.second;
    }
    return aggregate_ellipse(xs, ys, a, b, l_lane);
}

}  // namespace sscmpc
