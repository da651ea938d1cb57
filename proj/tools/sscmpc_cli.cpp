#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "sscmpc/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Scenario + stochastic MPC highway simulator"};

    std::string config_path;
    std::string mode;
    std::string scenario;
    std::string out_dir;
    int runs = -1;
    long long seed = -1;
    int threads = -1;

    app.add_option("--config", config_path, "experiment config file (key = value lines)");
    app.add_option("--mode", mode, "controller mode: ssc | smpc_only | scmpc_only");
    app.add_option("--scenario", scenario, "scenario source: table1 | random | <path>");
    app.add_option("--runs", runs, "Monte Carlo runs per sweep point");
    app.add_option("--seed", seed, "base RNG seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads (0 = auto)");

    CLI11_PARSE(app, argc, argv);

    try {
        std::string text;
        if (!config_path.empty()) text = sscmpc::read_text_file(config_path);

        // command-line flags override file values
        if (!mode.empty()) text += "\nmode = " + mode;
        if (!scenario.empty()) text += "\nscenario = " + scenario;
        if (runs >= 0) text += "\nruns = " + std::to_string(runs);
        if (seed >= 0) text += "\nseed = " + std::to_string(seed);
        if (!out_dir.empty()) text += "\nout = " + out_dir;
        if (threads >= 0) text += "\nthreads = " + std::to_string(threads);

        const sscmpc::ExperimentSpec spec = sscmpc::parse_config(text);
        sscmpc::run_experiment(spec);

        std::cout << "wrote " << spec.out_dir << "/report.csv\n";
        return 0;
    } catch (const sscmpc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const sscmpc::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
