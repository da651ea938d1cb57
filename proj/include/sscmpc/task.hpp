#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "sscmpc/rng.hpp"

namespace sscmpc {

enum class LateralManeuver : int { LK = 0, LCL = 1, LCR = 2 };
enum class LongitudinalManeuver : int { IA = 0, AC = 1, BR = 2 };

/// One discrete obstacle behavior option: a lateral maneuver combined with a
/// longitudinal one, assumed constant over a prediction horizon.
struct Task {
    LateralManeuver lateral = LateralManeuver::LK;
    LongitudinalManeuver longitudinal = LongitudinalManeuver::IA;

    auto operator<=>(const Task&) const = default;
};

std::string to_string(LateralManeuver m);
std::string to_string(LongitudinalManeuver m);
std::string to_string(const Task& t);

/// Discrete task distribution, stored sorted ascending by probability so that
/// entries.front() is the least likely task.
class TaskDistribution {
public:
    struct Entry {
        Task task;
        double p = 0.0;
    };

    /// Validates (probabilities in (0,1], sum 1 within 1e-9), sorts ascending
    /// by probability with a canonical tie-break on the task value.
    static TaskDistribution from_entries(std::vector<Entry> entries);

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    double p_min() const { return entries_.front().p; }

private:
    std::vector<Entry> entries_;
};

struct SampleSet {
    std::vector<Task> samples;
    std::uint64_t seed = 0;
};

/// Smallest sample count K such that the probability of the least likely task
/// occurring while absent from K i.i.d. draws stays below 1 - beta_ta.
/// Floored at 1 when the logarithmic bound is non-positive.
int required_sample_size(double p1, double beta_ta);

/// Monte Carlo estimate of the miss probability P(T1 occurs and T1 not among
/// K samples) on the two-task worst case (p1, 1-p1). Test oracle for
/// required_sample_size; analytic value is p1*(1-p1)^K.
double verify_bound(double p1, int K, long n_trials, RandomStream& rng);

/// K i.i.d. draws by inverse CDF over the sorted entries; deterministic for a
/// given seed (the seed is recorded in the returned set).
SampleSet draw_samples(const TaskDistribution& dist, int K, std::uint64_t seed);

/// Joint distribution as the product of independent lateral and longitudinal
/// marginals. The lane-change mass p_lc splits equally over the available
/// sides, or goes entirely to the single available one; zero-probability
/// tasks are dropped.
TaskDistribution build_joint_distribution(double p_lc, double p_acc, double p_brk,
                                          bool left_available, bool right_available);

}  // namespace sscmpc
