#include "sscmpc/experiment.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include "sscmpc/csv.hpp"
#include "sscmpc/rng.hpp"
#include "sscmpc/svg.hpp"

namespace sscmpc {

int resolve_threads(int requested) {
    int n = requested;
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* env = std::getenv("SSC_MPC_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return n;
}

namespace {

McResult run_combination(const ExperimentSpec& spec, double beta_ta, double beta_ex, int threads) {
    OcpConfig cfg = spec.controller;
    cfg.mode = spec.mode;
    cfg.beta_ta = beta_ta;
    cfg.beta_ex = beta_ex;

    ScenarioConfig scenario = spec.scenario;
    scenario.phase2.beta_ta = beta_ta;

    if (spec.source != ScenarioSource::Random) {
        return monte_carlo(scenario, cfg, spec.n_runs, spec.base_seed, threads);
    }

    // randomized TV settings: a fresh scenario per run, same seed stream as
    // the episode so the pair is reproducible from (base_seed, run)
    McResult result;
    result.traces.resize(static_cast<std::size_t>(spec.n_runs));
    std::atomic<int> next_run{0};
    auto worker = [&]() {
        for (;;) {
            const int run = next_run.fetch_add(1);
            if (run >= spec.n_runs) return;
            const std::uint64_t seed =
                derive_seed(spec.base_seed, {static_cast<std::uint64_t>(run)});
            ScenarioConfig sc = random_scenario(seed);
            sc.phase1 = scenario.phase1;
            sc.phase2 = scenario.phase2;
            sc.n_steps = scenario.n_steps;
            sc.phase1_steps = scenario.phase1_steps;
            result.traces[static_cast<std::size_t>(run)] = run_episode(sc, cfg, seed);
        }
    };
    std::vector<std::thread> pool;
    const int n_workers = std::max(1, std::min(threads, spec.n_runs));
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    McReport& rep = result.report;
    rep.runs = spec.n_runs;
    for (const EpisodeTrace& tr : result.traces) {
        rep.run_seeds.push_back(tr.seed);
        if (tr.collided) ++rep.collisions;
        rep.mean_j100 += tr.j100;
        rep.mean_infeasible_ocp_steps += tr.infeasible_ocp_steps;
        rep.mean_infeasible_recovery_steps += tr.infeasible_recovery_steps;
    }
    rep.mean_j100 /= spec.n_runs;
    rep.mean_infeasible_ocp_steps /= spec.n_runs;
    rep.mean_infeasible_recovery_steps /= spec.n_runs;
    return result;
}

}  // namespace

void run_experiment(const ExperimentSpec& spec_in) {
    ExperimentSpec spec = spec_in;
    spec.validate();

    if (spec.source == ScenarioSource::File) {
        spec.scenario = parse_scenario(read_text_file(spec.scenario_path));
    }

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(spec.out_dir, ec);
    if (ec || !fs::is_directory(spec.out_dir))
        throw IoError("cannot create output directory: " + spec.out_dir);

    const int threads = resolve_threads(spec.threads);

    std::vector<ReportRow> rows;
    bool first = true;
    EpisodeTrace run0;
    for (double beta_ta : spec.beta_ta_sweep) {
        for (double beta_ex : spec.beta_ex_sweep) {
            const McResult res = run_combination(spec, beta_ta, beta_ex, threads);

            ReportRow row;
            row.mode = mode_name(spec.mode);
            row.beta_ta = beta_ta;
            row.beta_ex = beta_ex;
            row.report = res.report;
            row.base_seed = spec.base_seed;
            rows.push_back(row);

            if (first) {
                // per-run traces for the first sweep combination
                for (std::size_t i = 0; i < res.traces.size(); ++i) {
                    write_trace_csv(spec.out_dir + "/trace_" + std::to_string(i) + ".csv",
                                    res.traces[i]);
                }
                run0 = res.traces.front();
                first = false;
            }
        }
    }

    write_report_csv(spec.out_dir + "/report.csv", rows);
    write_summary_svg(spec.out_dir + "/summary.svg", rows, run0, spec.scenario.road);
}

}  // namespace sscmpc
