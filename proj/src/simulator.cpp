#include "sscmpc/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "sscmpc/rng.hpp"

namespace sscmpc {

ScenarioConfig table1_scenario() {
    ScenarioConfig sc;
    sc.ev_initial = {0.0, 27.0, 3.5, 0.0};
    // lanes: 0 = left (y = 0), 1 = center, 2 = right
    sc.tvs = {
        {{-25.0, 17.0, 7.0, 0.0}, 22.0, {}},                 // TV1, right lane
        {{25.0, 27.0, 7.0, 0.0}, 22.0, {}},                  // TV2, right lane
        {{40.0, 27.0, 3.5, 0.0}, 17.0, {}},                  // TV3, slowing ahead of the EV
        {{-30.0, 27.0, 0.0, 0.0}, 17.0, {true, 1, 1}},       // TV4, merges to the center lane
        {{-10.0, 22.0, 0.0, 0.0}, 27.0, {}},                 // TV5, closing in the left lane
    };
    return sc;
}

bool check_collision(const AgentState& ev, const std::vector<AgentState>& tvs,
                     double vehicle_length, double vehicle_width) {
    for (const AgentState& tv : tvs) {
        if (std::abs(ev.x - tv.x) < vehicle_length && std::abs(ev.y - tv.y) < vehicle_width)
            return true;
    }
    return false;
}

namespace {

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

AgentInput clip_input(const AgentInput& u, const AgentInput& u_prev, const OcpBounds& bd) {
    AgentInput out;
    out.ux = clamp(clamp(u.ux, u_prev.ux + bd.dux_min, u_prev.ux + bd.dux_max), bd.ux_min, bd.ux_max);
    out.uy = clamp(clamp(u.uy, u_prev.uy + bd.duy_min, u_prev.uy + bd.duy_max), bd.uy_min, bd.uy_max);
    return out;
}

std::vector<AgentInput> shift_plan(std::vector<AgentInput> plan) {
    if (plan.size() > 1) {
        plan.erase(plan.begin());
        plan.push_back(plan.back());
    }
    return plan;
}

}  // namespace

EpisodeTrace run_episode(const ScenarioConfig& scenario, const OcpConfig& controller,
                         std::uint64_t seed) {
    const int n_tv = static_cast<int>(scenario.tvs.size());
    const ObstacleModel tv_model = ObstacleModel::highway_default(scenario.dt);
    const LinearModel ev_model = LinearModel::point_mass(scenario.dt);
    const double sigma_meas_x = std::sqrt(tv_model.sigma_meas()(0, 0));
    const double sigma_meas_y = std::sqrt(tv_model.sigma_meas()(1, 1));

    // Separate world and controller streams so that all controller modes see
    // the same disturbance realization for a given seed.
    RandomStream world(derive_seed(seed, {kWorldStream}));
    RandomStream ctrl(derive_seed(seed, {kControllerStream}));

    EpisodeTrace trace;
    trace.seed = seed;
    trace.steps.reserve(static_cast<std::size_t>(scenario.n_steps));

    AgentState ev = scenario.ev_initial;
    std::vector<AgentState> tvs;
    std::vector<int> tv_home_lane;
    for (const TvSpec& spec : scenario.tvs) {
        tvs.push_back(spec.initial);
        tv_home_lane.push_back(scenario.road.nearest_lane(spec.initial.y));
    }

    AgentInput u_prev{};
    std::vector<AgentInput> pending_plan;  // shifted last feasible plan

    for (int step = 0; step < scenario.n_steps; ++step) {
        const bool phase1 = step < scenario.phase1_steps;
        const PhaseParams& ph = phase1 ? scenario.phase1 : scenario.phase2;

        StepRecord rec;
        rec.step = step;
        rec.phase = phase1 ? 1 : 2;
        rec.phase_params = ph;
        rec.ev = ev;
        rec.tvs = tvs;

        // 1. corrupt TV positions with measurement noise
        rec.tvs_measured = tvs;
        for (AgentState& m : rec.tvs_measured) {
            m.x += scenario.measurement_noise_scale * sigma_meas_x * world.gaussian();
            m.y += scenario.measurement_noise_scale * sigma_meas_y * world.gaussian();
        }

        // 2. sample tasks and solve the OCP
        OcpConfig cfg = controller;
        cfg.beta_ta = ph.beta_ta;

        std::vector<ObstacleInfo> infos;
        infos.reserve(static_cast<std::size_t>(n_tv));
        for (int i = 0; i < n_tv; ++i) {
            const AgentState& meas = rec.tvs_measured[static_cast<std::size_t>(i)];
            const int lane = scenario.road.nearest_lane(meas.y);
            const TaskDistribution dist = build_joint_distribution(
                ph.p_lc, ph.p_acc, ph.p_brk, lane > 0, lane < scenario.road.lanes - 1);
            int k = 1;
            if (dist.size() > 1) {
                const double p1 = cfg.p1_override > 0.0 ? cfg.p1_override : dist.p_min();
                k = required_sample_size(p1, ph.beta_ta);
            }
            rec.sample_counts.push_back(k);
            infos.push_back(ObstacleInfo{tv_model, meas, draw_samples(dist, k, ctrl.next_u64())});
        }

        const auto predictions = predict_obstacles(infos, scenario.road, cfg, &ctrl);

        const AgentState ev_ref{0.0, scenario.ev_v_ref,
                                scenario.road.lane_center(scenario.road.nearest_lane(ev.y)), 0.0};
        rec.ev_ref = ev_ref;
        const std::vector<AgentState> refs(static_cast<std::size_t>(cfg.horizon), ev_ref);

        const OcpProblem problem = build_problem(ev, u_prev, predictions, refs, ev_model, cfg);

        bool hard_infeasible = false;
        const OcpSolution sol = solve_with_recovery(
            problem, pending_plan.empty() ? nullptr : &pending_plan, &hard_infeasible);
        if (hard_infeasible) ++trace.infeasible_ocp_steps;

        AgentInput u;
        if (sol.feasible()) {
            u = sol.inputs.front();
            pending_plan = shift_plan(sol.inputs);
        } else {
            // even the recovery problem failed: follow the last feasible plan
            ++trace.infeasible_recovery_steps;
            u = pending_plan.empty() ? AgentInput{} : pending_plan.front();
            if (!pending_plan.empty()) pending_plan = shift_plan(pending_plan);
        }
        u = clip_input(u, u_prev, cfg.bounds);

        rec.input = u;
        rec.status = sol.status;
        rec.slack_total = sol.slack_total;
        rec.scp_iterations = sol.solver_iterations;

        // 3. advance the EV
        ev = step_agent(ev_model, ev, u);
        u_prev = u;

        // 4. advance the TVs along their scripts
        for (int i = 0; i < n_tv; ++i) {
            const TvSpec& spec = scenario.tvs[static_cast<std::size_t>(i)];
            int lane = tv_home_lane[static_cast<std::size_t>(i)];
            if (spec.script.lane_change && step >= spec.script.at_step) lane = spec.script.to_lane;
            const AgentState ref{0.0, spec.v_ref, scenario.road.lane_center(lane), 0.0};
            Vec4 w;
            for (int d = 0; d < 4; ++d) w(d) = scenario.execution_noise_scale * world.gaussian();
            tvs[static_cast<std::size_t>(i)] =
                step_obstacle(tv_model, tvs[static_cast<std::size_t>(i)], ref, w);
            const double y = tvs[static_cast<std::size_t>(i)].y;
            if (y < scenario.road.y_min() - 1.0 || y > scenario.road.y_max() + 1.0)
                ++trace.road_departure_steps;
        }

        // 5. metrics
        rec.collision = check_collision(ev, tvs, scenario.vehicle_length, scenario.vehicle_width);
        trace.collided = trace.collided || rec.collision;

        const Vec4 dxi = ev.vec() - ev_ref.vec();
        trace.j100 += dxi.dot(controller.Q * dxi) + u.vec().dot(controller.R * u.vec());

        trace.steps.push_back(std::move(rec));
    }

    trace.ev_final = ev;
    trace.tvs_final = tvs;
    return trace;
}

double closed_loop_cost(const EpisodeTrace& trace, const Mat4& Q, const Mat2& R) {
    double j = 0.0;
    const std::size_t n = trace.steps.size();
    for (std::size_t k = 0; k < n; ++k) {
        const StepRecord& rec = trace.steps[k];
        const AgentState& next = (k + 1 < n) ? trace.steps[k + 1].ev : trace.ev_final;
        const Vec4 dxi = next.vec() - rec.ev_ref.vec();
        j += dxi.dot(Q * dxi) + rec.input.vec().dot(R * rec.input.vec());
    }
    return j;
}

McResult monte_carlo(const ScenarioConfig& scenario, const OcpConfig& controller, int n_runs,
                     std::uint64_t base_seed, int threads) {
    if (n_runs < 1) throw DomainError("monte_carlo: n_runs must be >= 1");
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n_runs));

    McResult result;
    result.traces.resize(static_cast<std::size_t>(n_runs));

    std::atomic<int> next_run{0};
    auto worker = [&]() {
        for (;;) {
            const int run = next_run.fetch_add(1);
            if (run >= n_runs) return;
            const std::uint64_t seed = derive_seed(base_seed, {static_cast<std::uint64_t>(run)});
            result.traces[static_cast<std::size_t>(run)] = run_episode(scenario, controller, seed);
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    McReport& rep = result.report;
    rep.runs = n_runs;
    for (const EpisodeTrace& tr : result.traces) {
        rep.run_seeds.push_back(tr.seed);
        if (tr.collided) ++rep.collisions;
        rep.mean_j100 += tr.j100;
        rep.mean_infeasible_ocp_steps += tr.infeasible_ocp_steps;
        rep.mean_infeasible_recovery_steps += tr.infeasible_recovery_steps;
    }
    rep.mean_j100 /= n_runs;
    rep.mean_infeasible_ocp_steps /= n_runs;
    rep.mean_infeasible_recovery_steps /= n_runs;
    return result;
}

ScenarioConfig random_scenario(std::uint64_t seed) {
    RandomStream rng(derive_seed(seed, {kScenarioStream}));
    ScenarioConfig sc = table1_scenario();

    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<TvSpec> tvs;
        for (int i = 0; i < 5; ++i) {
            TvSpec spec;
            spec.initial.x = rng.uniform(-150.0, 150.0);
            spec.initial.y = sc.road.lane_center(static_cast<int>(rng.uniform_index(3)));
            spec.initial.vx = rng.uniform(17.0, 27.0);
            spec.initial.vy = 0.0;
            spec.v_ref = spec.initial.vx;  // constant velocity target
            tvs.push_back(spec);
        }

        // same-lane spacing and non-approaching velocity ordering; the EV
        // counts as a center-lane vehicle for the spacing rule
        bool ok = true;
        for (std::size_t i = 0; i < tvs.size() && ok; ++i) {
            const int lane_i = sc.road.nearest_lane(tvs[i].initial.y);
            if (lane_i == sc.road.nearest_lane(sc.ev_initial.y) &&
                std::abs(tvs[i].initial.x - sc.ev_initial.x) < 50.0)
                ok = false;
            for (std::size_t j = i + 1; j < tvs.size() && ok; ++j) {
                if (lane_i != sc.road.nearest_lane(tvs[j].initial.y)) continue;
                if (std::abs(tvs[i].initial.x - tvs[j].initial.x) < 50.0) ok = false;
                const TvSpec& lead = tvs[i].initial.x >= tvs[j].initial.x ? tvs[i] : tvs[j];
                const TvSpec& trail = tvs[i].initial.x >= tvs[j].initial.x ? tvs[j] : tvs[i];
                if (trail.v_ref > lead.v_ref) ok = false;
            }
        }
        if (ok) {
            sc.tvs = std::move(tvs);
            sc.seed = seed;
            return sc;
        }
    }
    throw GenerationError("random_scenario: resampling budget exhausted");
}

}  // namespace sscmpc
