#include "sscmpc/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace sscmpc {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

struct KeyValue {
    std::string key;
    std::string value;
    int line = 0;
};

std::vector<KeyValue> tokenize(const std::string& text) {
    std::vector<KeyValue> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        KeyValue kv;
        kv.key = trim(line.substr(0, eq));
        kv.value = trim(line.substr(eq + 1));
        kv.line = lineno;
        if (kv.key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        out.push_back(std::move(kv));
    }
    return out;
}

[[noreturn]] void fail(const KeyValue& kv, const std::string& msg) {
    throw ConfigError("line " + std::to_string(kv.line) + " (" + kv.key + "): " + msg);
}

double parse_double(const KeyValue& kv, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) fail(kv, "malformed number '" + v + "'");
        return d;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        fail(kv, "malformed number '" + v + "'");
    }
}

long long parse_int(const KeyValue& kv, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) fail(kv, "malformed integer '" + v + "'");
        return i;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        fail(kv, "malformed integer '" + v + "'");
    }
}

bool parse_bool(const KeyValue& kv, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(kv, "malformed boolean '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> parts;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) parts.push_back(trim(item));
    return parts;
}

std::vector<double> parse_double_list(const KeyValue& kv) {
    std::vector<double> out;
    for (const std::string& s : split_list(kv.value)) out.push_back(parse_double(kv, s));
    return out;
}

ControllerMode parse_mode(const KeyValue& kv) {
    if (kv.value == "ssc") return ControllerMode::SSC;
    if (kv.value == "smpc_only") return ControllerMode::SmpcOnly;
    if (kv.value == "scmpc_only") return ControllerMode::ScmpcOnly;
    fail(kv, "unknown mode '" + kv.value + "' (ssc | smpc_only | scmpc_only)");
}

PhaseParams parse_phase(const KeyValue& kv) {
    const auto parts = split_list(kv.value);
    if (parts.size() != 4) fail(kv, "expected p_lc, p_acc, p_brk, beta_ta");
    PhaseParams ph;
    ph.p_lc = parse_double(kv, parts[0]);
    ph.p_acc = parse_double(kv, parts[1]);
    ph.p_brk = parse_double(kv, parts[2]);
    ph.beta_ta = parse_double(kv, parts[3]);
    return ph;
}

}  // namespace

void ExperimentSpec::validate() const {
    if (beta_ta_sweep.empty()) throw ConfigError("beta_ta sweep must be nonempty");
    if (beta_ex_sweep.empty()) throw ConfigError("beta_ex sweep must be nonempty");
    for (double b : beta_ta_sweep)
        if (!(b > 0.0) || !(b < 1.0)) throw ConfigError("beta_ta values must lie in (0, 1)");
    for (double b : beta_ex_sweep)
        if (!(b >= 0.5) || !(b < 1.0)) throw ConfigError("beta_ex values must lie in [0.5, 1)");
    if (n_runs < 1) throw ConfigError("runs must be >= 1");
    if (controller.horizon < 1) throw ConfigError("horizon must be >= 1");
    if (source == ScenarioSource::File && scenario_path.empty())
        throw ConfigError("scenario file path is empty");
}

ScenarioConfig parse_scenario(const std::string& text) {
    ScenarioConfig sc = table1_scenario();
    sc.tvs.clear();
    bool ev_set = false;

    for (const KeyValue& kv : tokenize(text)) {
        if (kv.key == "dt") {
            sc.dt = parse_double(kv, kv.value);
            if (!(sc.dt > 0)) fail(kv, "dt must be positive");
        } else if (kv.key == "n_steps") {
            sc.n_steps = static_cast<int>(parse_int(kv, kv.value));
            if (sc.n_steps < 1) fail(kv, "n_steps must be >= 1");
        } else if (kv.key == "phase1_steps") {
            sc.phase1_steps = static_cast<int>(parse_int(kv, kv.value));
            if (sc.phase1_steps < 0) fail(kv, "phase1_steps must be >= 0");
        } else if (kv.key == "phase1") {
            sc.phase1 = parse_phase(kv);
        } else if (kv.key == "phase2") {
            sc.phase2 = parse_phase(kv);
        } else if (kv.key == "ev_initial") {
            const auto parts = split_list(kv.value);
            if (parts.size() != 4) fail(kv, "expected x, vx, y, vy");
            sc.ev_initial = {parse_double(kv, parts[0]), parse_double(kv, parts[1]),
                             parse_double(kv, parts[2]), parse_double(kv, parts[3])};
            ev_set = true;
        } else if (kv.key == "ev_v_ref") {
            sc.ev_v_ref = parse_double(kv, kv.value);
        } else if (kv.key == "tv") {
            // x, vx, y, vy, v_ref [, to_lane @ step]
            const auto parts = split_list(kv.value);
            if (parts.size() != 5 && parts.size() != 6) fail(kv, "expected 5 or 6 fields");
            TvSpec spec;
            spec.initial = {parse_double(kv, parts[0]), parse_double(kv, parts[1]),
                            parse_double(kv, parts[2]), parse_double(kv, parts[3])};
            spec.v_ref = parse_double(kv, parts[4]);
            if (parts.size() == 6) {
                const std::string& s = parts[5];
                const std::size_t at = s.find('@');
                if (at == std::string::npos) fail(kv, "lane script must be to_lane@step");
                spec.script.lane_change = true;
                spec.script.to_lane = static_cast<int>(parse_int(kv, trim(s.substr(0, at))));
                spec.script.at_step = static_cast<int>(parse_int(kv, trim(s.substr(at + 1))));
                if (spec.script.to_lane < 0 || spec.script.to_lane >= sc.road.lanes)
                    fail(kv, "lane script target outside the road");
            }
            sc.tvs.push_back(spec);
        } else {
            fail(kv, "unknown scenario key");
        }
    }
    if (!ev_set && sc.tvs.empty()) throw ConfigError("scenario file defines no vehicles");
    return sc;
}

ExperimentSpec parse_config(const std::string& text) {
    ExperimentSpec spec;
    spec.scenario = table1_scenario();

    for (const KeyValue& kv : tokenize(text)) {
        if (kv.key == "scenario") {
            if (kv.value == "table1") {
                spec.source = ScenarioSource::Table1;
            } else if (kv.value == "random") {
                spec.source = ScenarioSource::Random;
            } else {
                spec.source = ScenarioSource::File;
                spec.scenario_path = kv.value;
            }
        } else if (kv.key == "mode") {
            spec.mode = parse_mode(kv);
        } else if (kv.key == "beta_ta") {
            spec.beta_ta_sweep = parse_double_list(kv);
            for (double b : spec.beta_ta_sweep)
                if (!(b > 0.0) || !(b < 1.0)) fail(kv, "beta_ta values must lie in (0, 1)");
        } else if (kv.key == "beta_ex") {
            spec.beta_ex_sweep = parse_double_list(kv);
            for (double b : spec.beta_ex_sweep)
                if (!(b >= 0.5) || !(b < 1.0)) fail(kv, "beta_ex values must lie in [0.5, 1)");
        } else if (kv.key == "runs") {
            spec.n_runs = static_cast<int>(parse_int(kv, kv.value));
            if (spec.n_runs < 1) fail(kv, "runs must be >= 1");
        } else if (kv.key == "seed") {
            spec.base_seed = static_cast<std::uint64_t>(parse_int(kv, kv.value));
        } else if (kv.key == "out") {
            spec.out_dir = kv.value;
        } else if (kv.key == "threads") {
            spec.threads = static_cast<int>(parse_int(kv, kv.value));
            if (spec.threads < 0) fail(kv, "threads must be >= 0");
        } else if (kv.key == "horizon") {
            spec.controller.horizon = static_cast<int>(parse_int(kv, kv.value));
            if (spec.controller.horizon < 1) fail(kv, "horizon must be >= 1");
        } else if (kv.key == "lambda_slack") {
            spec.controller.lambda_slack = parse_double(kv, kv.value);
            if (spec.controller.lambda_slack < 0) fail(kv, "lambda_slack must be >= 0");
        } else if (kv.key == "beta_ex_recovery") {
            spec.controller.beta_ex_recovery = parse_double(kv, kv.value);
            if (!(spec.controller.beta_ex_recovery >= 0.5) ||
                !(spec.controller.beta_ex_recovery < 1.0))
                fail(kv, "beta_ex_recovery must lie in [0.5, 1)");
        } else if (kv.key == "p1_override") {
            spec.controller.p1_override = parse_double(kv, kv.value);
            if (spec.controller.p1_override < 0.0 || spec.controller.p1_override >= 1.0)
                fail(kv, "p1_override must lie in [0, 1); 0 disables the override");
        } else if (kv.key == "k_ex") {
            spec.controller.k_ex_override = static_cast<int>(parse_int(kv, kv.value));
            if (spec.controller.k_ex_override < 0) fail(kv, "k_ex must be >= 0");
        } else if (kv.key == "aggregate_samples") {
            spec.controller.aggregate_samples = parse_bool(kv, kv.value);
        } else if (kv.key == "maneuver_dv") {
            spec.controller.maneuver_dv = parse_double(kv, kv.value);
            if (spec.controller.maneuver_dv < 0) fail(kv, "maneuver_dv must be >= 0");
        } else if (kv.key == "ellipse_a") {
            spec.controller.ellipse_a = parse_double(kv, kv.value);
            if (!(spec.controller.ellipse_a > 0)) fail(kv, "ellipse_a must be positive");
        } else if (kv.key == "ellipse_b") {
            spec.controller.ellipse_b = parse_double(kv, kv.value);
            if (!(spec.controller.ellipse_b > 0)) fail(kv, "ellipse_b must be positive");
        } else {
            fail(kv, "unknown key");
        }
    }

    spec.controller.mode = spec.mode;
    spec.validate();
    return spec;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace sscmpc
