#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sscmpc {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Mat42 = Eigen::Matrix<double, 4, 2>;
using Mat24 = Eigen::Matrix<double, 2, 4>;
using RowVec4 = Eigen::RowVector4d;

/// Planar double-integrator state [x, vx, y, vy] shared by the controlled
/// vehicle and all obstacles.
struct AgentState {
    double x = 0.0;
    double vx = 0.0;
    double y = 0.0;
    double vy = 0.0;

    Vec4 vec() const { return Vec4(x, vx, y, vy); }
    static AgentState from_vec(const Vec4& v) { return {v(0), v(1), v(2), v(3)}; }

    bool finite() const {
        return std::isfinite(x) && std::isfinite(vx) && std::isfinite(y) && std::isfinite(vy);
    }
};

/// Acceleration input [ux, uy].
struct AgentInput {
    double ux = 0.0;
    double uy = 0.0;

    Vec2 vec() const { return Vec2(ux, uy); }
    static AgentInput from_vec(const Vec2& v) { return {v(0), v(1)}; }

    bool finite() const { return std::isfinite(ux) && std::isfinite(uy); }
};

struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidManeuver : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sscmpc
