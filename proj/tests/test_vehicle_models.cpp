#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "sscmpc/rng.hpp"
#include "sscmpc/vehicle_model.hpp"

using namespace sscmpc;

namespace {

Mat4 random_psd(RandomStream& rng) {
    Mat4 m;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = rng.gaussian();
    return m * m.transpose();
}

}  // namespace

TEST_CASE("point mass matrices match the double-integrator structure exactly") {
    const LinearModel m = LinearModel::point_mass(0.2);
    Mat4 a;
    a << 1, 0.2, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0.2, 0, 0, 0, 1;
    Mat42 b;
    b << 0.02, 0, 0.2, 0, 0, 0.02, 0, 0.2;
    CHECK((m.A - a).cwiseAbs().maxCoeff() == 0.0);
    CHECK((m.B - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("step_agent worked examples") {
    const LinearModel m = LinearModel::point_mass(0.2);
    const AgentState s1 = step_agent(m, {0, 27, 0, 0}, {0, 0});
    CHECK(s1.x == doctest::Approx(5.4));
    CHECK(s1.vx == 27.0);
    CHECK(s1.y == 0.0);

    const AgentState s2 = step_agent(m, {}, {0, 0});
    CHECK(s2.vec().cwiseAbs().maxCoeff() == 0.0);

    const AgentState s3 = step_agent(m, {}, {5, 0});
    CHECK(s3.x == doctest::Approx(0.1));
    CHECK(s3.vx == doctest::Approx(1.0));
}

TEST_CASE("step_agent is exactly linear") {
    const LinearModel m = LinearModel::point_mass(0.2);
    RandomStream rng(5);
    for (int i = 0; i < 100; ++i) {
        AgentState s1, s2;
        AgentInput u1, u2;
        s1 = {rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian()};
        s2 = {rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian()};
        u1 = {rng.gaussian(), rng.gaussian()};
        u2 = {rng.gaussian(), rng.gaussian()};
        const double a = rng.gaussian(), b = rng.gaussian();

        const Vec4 lhs = step_agent(m, AgentState::from_vec(a * s1.vec() + b * s2.vec()),
                                    AgentInput::from_vec(a * u1.vec() + b * u2.vec()))
                             .vec();
        const Vec4 rhs = a * step_agent(m, s1, u1).vec() + b * step_agent(m, s2, u2).vec();
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("feedback_input worked examples") {
    const ObstacleModel m = ObstacleModel::highway_default(0.2);

    const AgentState ref{3, 20, 1, 0.5};
    const AgentInput zero = feedback_input(m, ref, ref);
    CHECK(zero.ux == 0.0);
    CHECK(zero.uy == 0.0);

    const AgentInput u1 = feedback_input(m, {0, 1, 0, 0}, {});
    CHECK(u1.ux == doctest::Approx(-1.0));
    CHECK(u1.uy == doctest::Approx(0.0));

    const AgentInput u2 = feedback_input(m, {0, 0, 1, 1}, {});
    CHECK(u2.ux == doctest::Approx(0.0));
    CHECK(u2.uy == doctest::Approx(-3.0));
}

TEST_CASE("step_obstacle matches step_agent with the feedback input") {
    const ObstacleModel m = ObstacleModel::highway_default(0.2);
    const AgentState s{10, 25, 3.5, -0.2};
    const AgentState ref{0, 27, 3.5, 0};

    const AgentState via_obstacle = step_obstacle(m, s, ref, Vec4::Zero());
    const AgentState via_agent = step_agent(m.model(), s, feedback_input(m, s, ref));
    CHECK((via_obstacle.vec() - via_agent.vec()).cwiseAbs().maxCoeff() == 0.0);

    // equilibrium with zero velocity stays put
    const AgentState eq{5, 0, 3.5, 0};
    const AgentState eq_next = step_obstacle(m, eq, eq, Vec4::Zero());
    CHECK((eq_next.vec() - eq.vec()).cwiseAbs().maxCoeff() == 0.0);

    // noise enters through the diagonal G
    const AgentState drift = step_obstacle(m, eq, eq, Vec4::Ones());
    const Vec4 offset = drift.vec() - eq.vec();
    CHECK(offset(0) == doctest::Approx(0.05));
    CHECK(offset(1) == doctest::Approx(0.067));
    CHECK(offset(2) == doctest::Approx(0.013));
    CHECK(offset(3) == doctest::Approx(0.03));
}

TEST_CASE("nominal_trajectory basics") {
    const ObstacleModel m = ObstacleModel::highway_default(0.2);

    // at the reference velocity: constant-velocity rollout
    const AgentState s0{0, 22, 7, 0};
    const std::vector<AgentState> refs(12, AgentState{0, 22, 7, 0});
    const auto traj = nominal_trajectory(m, s0, refs);
    REQUIRE(traj.size() == 12);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        CHECK(traj[k].x == doctest::Approx(22.0 * 0.2 * (k + 1)));
        CHECK(traj[k].vx == doctest::Approx(22.0));
        CHECK(traj[k].y == doctest::Approx(7.0));
    }

    // single step equals step_obstacle
    const std::vector<AgentState> one(1, AgentState{0, 25, 7, 0});
    const auto single = nominal_trajectory(m, s0, one);
    const AgentState direct = step_obstacle(m, s0, one[0], Vec4::Zero());
    CHECK((single[0].vec() - direct.vec()).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(nominal_trajectory(m, s0, {}), DomainError);
}

TEST_CASE("lane change converges without lateral overshoot") {
    const ObstacleModel m = ObstacleModel::highway_default(0.2);
    const AgentState s0{0, 27, 3.5, 0};
    const std::vector<AgentState> refs(60, AgentState{0, 27, 0, 0});
    const auto traj = nominal_trajectory(m, s0, refs);

    double prev_err = 3.5;
    for (const AgentState& s : traj) {
        const double err = std::abs(s.y - 0.0);
        CHECK(err <= 3.5 + 1e-12);  // no overshoot beyond the initial offset
        CHECK(err <= prev_err + 1e-9);
        prev_err = err;
    }
    // slowest closed-loop mode is ~0.913 per step: ~1.35% of the offset is
    // left after 50 steps and convergence to below 1% needs a few more
    CHECK(std::abs(traj[49].y) <= 0.02 * 3.5);
    CHECK(std::abs(traj[59].y) <= 0.01 * 3.5);
}

TEST_CASE("propagate_covariance worked examples") {
    const ObstacleModel m = ObstacleModel::highway_default(0.2);

    const ErrorCovariance one = propagate_covariance(m, ErrorCovariance{});
    const Vec4 expected(0.0025, 0.004489, 0.000169, 0.0009);
    CHECK((one.sigma_e - Mat4(expected.asDiagonal())).cwiseAbs().maxCoeff() < 1e-15);

    // zero execution noise keeps a zero covariance
    ObstacleModel quiet(m.model(), m.G(), m.K_fb(), Mat4::Zero(), m.sigma_meas());
    const ErrorCovariance zero = propagate_covariance(quiet, ErrorCovariance{});
    CHECK(zero.sigma_e.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("propagated covariance stays symmetric PSD") {
    const ObstacleModel m = ObstacleModel::highway_default(0.2);
    RandomStream rng(77);
    for (int i = 0; i < 200; ++i) {
        ErrorCovariance s{random_psd(rng)};
        const ErrorCovariance next = propagate_covariance(m, s);
        CHECK((next.sigma_e - next.sigma_e.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
        Eigen::SelfAdjointEigenSolver<Mat4> es(next.sigma_e);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    }
}

TEST_CASE("covariance recursion: growing trace, converging tracked block") {
    const ObstacleModel m = ObstacleModel::highway_default(0.2);
    ErrorCovariance s{};
    Mat4 prev = Mat4::Zero();
    double prev_trace = 0.0;
    int tracked_block_converged_at = -1;
    for (int k = 1; k <= 500; ++k) {
        s = propagate_covariance(m, s);
        CHECK(s.sigma_e.trace() >= prev_trace - 1e-12);
        prev_trace = s.sigma_e.trace();
        // longitudinal position integrates velocity error and keeps growing;
        // the velocity/lateral block reaches its fixed point
        const double sub_delta =
            (s.sigma_e.bottomRightCorner<3, 3>() - prev.bottomRightCorner<3, 3>())
                .cwiseAbs()
                .maxCoeff();
        if (tracked_block_converged_at < 0 && k > 1 && sub_delta < 1e-9)
            tracked_block_converged_at = k;
        prev = s.sigma_e;
    }
    CHECK(tracked_block_converged_at > 0);
    CHECK(tracked_block_converged_at <= 500);
    CHECK(s.sigma_e(0, 0) > 1.0);  // x-variance keeps accumulating
}

TEST_CASE("maneuver_reference targets") {
    const RoadGeometry road;
    const AgentState center{100, 24, 3.5, 0};

    const auto lk = maneuver_reference({LateralManeuver::LK, LongitudinalManeuver::IA}, center,
                                       road, 12);
    REQUIRE(lk.size() == 12);
    CHECK(lk[0].vx == 24.0);
    CHECK(lk[0].y == 3.5);
    CHECK(lk[0].vy == 0.0);

    const auto lcl = maneuver_reference({LateralManeuver::LCL, LongitudinalManeuver::IA}, center,
                                        road, 4);
    CHECK(lcl[0].y == 0.0);

    const AgentState left{0, 20, 0, 0};
    const auto lcr = maneuver_reference({LateralManeuver::LCR, LongitudinalManeuver::IA}, left,
                                        road, 4);
    CHECK(lcr[0].y == 3.5);

    const auto ac = maneuver_reference({LateralManeuver::LK, LongitudinalManeuver::AC}, center,
                                       road, 4);
    CHECK(ac[0].vx == doctest::Approx(26.0));
    const auto br = maneuver_reference({LateralManeuver::LK, LongitudinalManeuver::BR}, center,
                                       road, 4);
    CHECK(br[0].vx == doctest::Approx(22.0));

    CHECK_THROWS_AS(
        maneuver_reference({LateralManeuver::LCL, LongitudinalManeuver::IA}, left, road, 4),
        InvalidManeuver);
    const AgentState right{0, 20, 7, 0};
    CHECK_THROWS_AS(
        maneuver_reference({LateralManeuver::LCR, LongitudinalManeuver::IA}, right, road, 4),
        InvalidManeuver);
}

TEST_CASE("ObstacleModel construction validates its inputs") {
    const LinearModel m = LinearModel::point_mass(0.2);
    const ObstacleModel ok = ObstacleModel::highway_default(0.2);
    CHECK((ok.phi() - (m.A + m.B * ok.K_fb())).cwiseAbs().maxCoeff() == 0.0);

    // no feedback: velocity errors never decay
    CHECK_THROWS_AS(ObstacleModel(m, Mat4::Identity(), Mat24::Zero(), Mat4::Identity(),
                                  Mat2::Identity()),
                    DomainError);

    // destabilizing sign
    Mat24 bad;
    bad << 0, 1.0, 0, 0, 0, 0, 0.8, 2.2;
    CHECK_THROWS_AS(ObstacleModel(m, Mat4::Identity(), bad, Mat4::Identity(), Mat2::Identity()),
                    DomainError);

    // asymmetric covariance
    Mat4 asym = Mat4::Identity();
    asym(0, 1) = 0.5;
    CHECK_THROWS_AS(ObstacleModel(m, Mat4::Identity(), ok.K_fb(), asym, Mat2::Identity()),
                    DomainError);

    // negative eigenvalue
    Mat2 neg = -Mat2::Identity();
    CHECK_THROWS_AS(ObstacleModel(m, Mat4::Identity(), ok.K_fb(), Mat4::Identity(), neg),
                    DomainError);
}

TEST_CASE("road geometry") {
    const RoadGeometry road;
    CHECK(road.lane_center(0) == 0.0);
    CHECK(road.lane_center(1) == 3.5);
    CHECK(road.lane_center(2) == 7.0);
    CHECK(road.nearest_lane(-2.0) == 0);
    CHECK(road.nearest_lane(1.74) == 0);
    CHECK(road.nearest_lane(1.76) == 1);
    CHECK(road.nearest_lane(9.0) == 2);
    CHECK(road.y_min() == doctest::Approx(-1.75));
    CHECK(road.y_max() == doctest::Approx(8.75));
}
