#include "sscmpc/task.hpp"

#include <algorithm>
#include <cmath>

#include "sscmpc/types.hpp"

namespace sscmpc {

std::string to_string(LateralManeuver m) {
    switch (m) {
        case LateralManeuver::LK: return "LK";
        case LateralManeuver::LCL: return "LCL";
        case LateralManeuver::LCR: return "LCR";
    }
    return "?";
}

std::string to_string(LongitudinalManeuver m) {
    switch (m) {
        case LongitudinalManeuver::IA: return "IA";
        case LongitudinalManeuver::AC: return "AC";
        case LongitudinalManeuver::BR: return "BR";
    }
    return "?";
}

std::string to_string(const Task& t) {
    return to_string(t.lateral) + "+" + to_string(t.longitudinal);
}

TaskDistribution TaskDistribution::from_entries(std::vector<Entry> entries) {
    if (entries.empty()) throw DomainError("TaskDistribution: no entries");
    double sum = 0.0;
    for (const Entry& e : entries) {
        if (!(e.p > 0.0) || e.p > 1.0) throw DomainError("TaskDistribution: probability outside (0, 1]");
        sum += e.p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw DomainError("TaskDistribution: probabilities do not sum to 1");

    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.p != b.p) return a.p < b.p;
        return a.task < b.task;  // canonical tie-break for reproducibility
    });

    TaskDistribution d;
    d.entries_ = std::move(entries);
    return d;
}

int required_sample_size(double p1, double beta_ta) {
    if (!(p1 > 0.0) || !(p1 < 1.0)) throw DomainError("required_sample_size: p1 outside (0, 1)");
    if (!(beta_ta > 0.0) || !(beta_ta < 1.0))
        throw DomainError("required_sample_size: beta_ta outside (0, 1)");

    // K strictly greater than log_{1-p1}((1-beta)/p1); base < 1 flips the sign.
    const double bound = std::log((1.0 - beta_ta) / p1) / std::log(1.0 - p1);
    const int k = static_cast<int>(std::floor(bound)) + 1;
    return std::max(1, k);
}

double verify_bound(double p1, int K, long n_trials, RandomStream& rng) {
    if (n_trials < 1) throw DomainError("verify_bound: n_trials must be >= 1");
    long misses = 0;
    for (long t = 0; t < n_trials; ++t) {
        bool sampled_t1 = false;
        for (int i = 0; i < K; ++i) {
            if (rng.uniform01() < p1) sampled_t1 = true;
        }
        const bool t1_occurs = rng.uniform01() < p1;
        if (t1_occurs && !sampled_t1) ++misses;
    }
    return static_cast<double>(misses) / static_cast<double>(n_trials);
}

SampleSet draw_samples(const TaskDistribution& dist, int K, std::uint64_t seed) {
    if (K < 1) throw DomainError("draw_samples: K must be >= 1");
    RandomStream rng(seed);
    SampleSet set;
    set.seed = seed;
    set.samples.reserve(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i) {
        const double u = rng.uniform01();
        double cum = 0.0;
        Task picked = dist.entries().back().task;
        for (const auto& e : dist.entries()) {
            cum += e.p;
            if (u < cum) {
                picked = e.task;
                break;
            }
        }
        set.samples.push_back(picked);
    }
    return set;
}

TaskDistribution build_joint_distribution(double p_lc, double p_acc, double p_brk,
                                          bool left_available, bool right_available) {
    if (p_lc < 0.0 || p_lc > 1.0 || p_acc < 0.0 || p_brk < 0.0)
        throw DomainError("build_joint_distribution: marginal outside [0, 1]");
    if (p_acc + p_brk >= 1.0) throw DomainError("build_joint_distribution: p_acc + p_brk >= 1");
    if (!left_available && !right_available && p_lc >= 1.0)
        throw DomainError("build_joint_distribution: lane change certain but no lane available");

    std::vector<std::pair<LateralManeuver, double>> lat;
    const int sides = (left_available ? 1 : 0) + (right_available ? 1 : 0);
    const double p_lc_eff = sides == 0 ? 0.0 : p_lc;
    lat.emplace_back(LateralManeuver::LK, 1.0 - p_lc_eff);
    if (left_available) lat.emplace_back(LateralManeuver::LCL, p_lc_eff / sides);
    if (right_available) lat.emplace_back(LateralManeuver::LCR, p_lc_eff / sides);

    std::vector<std::pair<LongitudinalManeuver, double>> lon = {
        {LongitudinalManeuver::IA, 1.0 - p_acc - p_brk},
        {LongitudinalManeuver::AC, p_acc},
        {LongitudinalManeuver::BR, p_brk},
    };

    std::vector<TaskDistribution::Entry> entries;
    for (const auto& [lm, pl] : lat) {
        for (const auto& [gm, pg] : lon) {
            const double p = pl * pg;
            if (p > 0.0) entries.push_back({Task{lm, gm}, p});
        }
    }
    return TaskDistribution::from_entries(std::move(entries));
}

}  // namespace sscmpc
