#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "sscmpc/task.hpp"
#include "sscmpc/types.hpp"

using namespace sscmpc;

TEST_CASE("required_sample_size worked values") {
    CHECK(required_sample_size(0.1, 0.99) == 22);
    CHECK(required_sample_size(0.1, 0.95) == 7);
    CHECK(required_sample_size(0.1, 0.89) == 1);
    CHECK(required_sample_size(0.1, 0.83) == 1);
    // log bound exactly 1: the strict inequality forces 2
    CHECK(required_sample_size(0.5, 0.75) == 2);
}

TEST_CASE("required_sample_size domain errors") {
    CHECK_THROWS_AS(required_sample_size(0.0, 0.9), DomainError);
    CHECK_THROWS_AS(required_sample_size(1.0, 0.9), DomainError);
    CHECK_THROWS_AS(required_sample_size(0.1, 0.0), DomainError);
    CHECK_THROWS_AS(required_sample_size(0.1, 1.0), DomainError);
}

TEST_CASE("sample size is non-decreasing in beta_ta and the miss bound holds") {
    for (double p1 : {0.02, 0.1, 0.25, 0.5}) {
        int prev = 1;
        for (double beta = 0.05; beta < 1.0; beta += 0.01) {
            const int k = required_sample_size(p1, beta);
            CHECK(k >= prev);
            prev = k;
            const double log_bound = std::log((1.0 - beta) / p1) / std::log(1.0 - p1);
            if (log_bound > 0.0) {
                CHECK(p1 * std::pow(1.0 - p1, k) < (1.0 - beta) + 1e-12);
            }
        }
    }
}

TEST_CASE("verify_bound matches the closed form within 3 sigma") {
    RandomStream rng(2024);
    const long trials = 100000;

    auto check_pair = [&](double p1, int k) {
        const double analytic = p1 * std::pow(1.0 - p1, k);
        const double est = verify_bound(p1, k, trials, rng);
        const double sigma = std::sqrt(analytic * (1.0 - analytic) / trials);
        CHECK(std::abs(est - analytic) <= 3.0 * sigma + 1e-12);
    };

    check_pair(0.1, 7);   // 0.1 * 0.9^7 ~ 0.04783 <= 0.05
    check_pair(0.5, 2);   // 0.125 <= 0.25
    check_pair(0.1, 60);  // ~ 1.8e-4: decays towards zero for large K
    CHECK(0.1 * std::pow(0.9, 7) <= 0.05);
    CHECK(0.5 * std::pow(0.5, 2) <= 0.25);
}

TEST_CASE("draw_samples determinism and degenerate distribution") {
    const TaskDistribution single = TaskDistribution::from_entries(
        {{Task{LateralManeuver::LK, LongitudinalManeuver::IA}, 1.0}});
    const SampleSet s = draw_samples(single, 9, 4242);
    REQUIRE(s.samples.size() == 9);
    for (const Task& t : s.samples)
        CHECK(t == Task{LateralManeuver::LK, LongitudinalManeuver::IA});
    CHECK(s.seed == 4242);

    const TaskDistribution dist = build_joint_distribution(0.2, 0.1, 0.1, true, true);
    const SampleSet a = draw_samples(dist, 50, 7);
    const SampleSet b = draw_samples(dist, 50, 7);
    CHECK(a.samples == b.samples);
    const SampleSet c = draw_samples(dist, 50, 8);
    CHECK(a.samples != c.samples);

    CHECK_THROWS_AS(draw_samples(dist, 0, 1), DomainError);
}

TEST_CASE("draw_samples frequencies sit in the 3 sigma binomial band") {
    const TaskDistribution dist = build_joint_distribution(0.2, 0.1, 0.1, true, true);
    const int n = 100000;
    const SampleSet s = draw_samples(dist, n, 31337);

    std::map<Task, int> counts;
    for (const Task& t : s.samples) ++counts[t];
    for (const auto& e : dist.entries()) {
        const double expect = e.p * n;
        const double sigma = std::sqrt(e.p * (1.0 - e.p) * n);
        CHECK(std::abs(counts[e.task] - expect) <= 3.0 * sigma);
    }
}

TEST_CASE("build_joint_distribution worked example") {
    const TaskDistribution d = build_joint_distribution(0.2, 0.1, 0.1, true, true);
    CHECK(d.size() == 9);

    double sum = 0.0;
    std::map<Task, double> p;
    for (const auto& e : d.entries()) {
        sum += e.p;
        p[e.task] = e.p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p[{LateralManeuver::LK, LongitudinalManeuver::IA}] == doctest::Approx(0.64));
    CHECK(p[{LateralManeuver::LCL, LongitudinalManeuver::AC}] == doctest::Approx(0.01));
    CHECK(d.p_min() == doctest::Approx(0.01));
}

TEST_CASE("degenerate and one-sided distributions") {
    const TaskDistribution lone = build_joint_distribution(0.0, 0.0, 0.0, true, true);
    CHECK(lone.size() == 1);
    CHECK(lone.entries()[0].task == Task{LateralManeuver::LK, LongitudinalManeuver::IA});
    CHECK(lone.entries()[0].p == 1.0);

    // only the right lane available: the full lane-change mass goes right
    const TaskDistribution right = build_joint_distribution(0.2, 0.0, 0.0, false, true);
    double p_lcr = 0.0, p_lcl = 0.0;
    for (const auto& e : right.entries()) {
        if (e.task.lateral == LateralManeuver::LCR) p_lcr += e.p;
        if (e.task.lateral == LateralManeuver::LCL) p_lcl += e.p;
    }
    CHECK(p_lcr == doctest::Approx(0.2));
    CHECK(p_lcl == 0.0);

    CHECK_THROWS_AS(build_joint_distribution(0.2, 0.6, 0.4, true, true), DomainError);
}

TEST_CASE("distribution entries stay sorted and normalized for random marginals") {
    RandomStream rng(555);
    for (int i = 0; i < 200; ++i) {
        const double p_lc = rng.uniform01() * 0.99;
        const double p_acc = rng.uniform01() * 0.49;
        const double p_brk = rng.uniform01() * 0.49;
        const bool left = rng.uniform01() < 0.5;
        const bool right = rng.uniform01() < 0.5;
        if (p_acc + p_brk >= 1.0) continue;
        if (!left && !right && p_lc >= 1.0) continue;

        const TaskDistribution d = build_joint_distribution(p_lc, p_acc, p_brk, left, right);
        double sum = 0.0, prev = 0.0;
        for (const auto& e : d.entries()) {
            CHECK(e.p >= prev);
            prev = e.p;
            sum += e.p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("TaskDistribution validation") {
    CHECK_THROWS_AS(TaskDistribution::from_entries({}), DomainError);
    CHECK_THROWS_AS(TaskDistribution::from_entries(
                        {{Task{LateralManeuver::LK, LongitudinalManeuver::IA}, 0.5}}),
                    DomainError);
    CHECK_THROWS_AS(TaskDistribution::from_entries(
                        {{Task{LateralManeuver::LK, LongitudinalManeuver::IA}, 0.0},
                         {Task{LateralManeuver::LK, LongitudinalManeuver::AC}, 1.0}}),
                    DomainError);
}
