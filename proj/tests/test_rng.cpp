#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sscmpc/rng.hpp"

using namespace sscmpc;

TEST_CASE("identical seeds give identical streams") {
    RandomStream a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different substream tags give unrelated streams") {
    const std::uint64_t base = 7;
    RandomStream world(derive_seed(base, {3, kWorldStream}));
    RandomStream ctrl(derive_seed(base, {3, kControllerStream}));
    int equal = 0;
    for (int i = 0; i < 64; ++i)
        if (world.next_u64() == ctrl.next_u64()) ++equal;
    CHECK(equal == 0);
}

TEST_CASE("derive_seed depends on every path element") {
    CHECK(derive_seed(1, {0, 1}) != derive_seed(1, {1, 0}));
    CHECK(derive_seed(1, {5}) != derive_seed(2, {5}));
    CHECK(derive_seed(1, {5}) == derive_seed(1, {5}));
}

TEST_CASE("uniform01 stays in [0, 1)") {
    RandomStream rng(123);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("gaussian moments") {
    RandomStream rng(99);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        sum += g;
        sum2 += g * g;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 0.02);
}
