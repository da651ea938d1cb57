#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "sscmpc/erfinv.hpp"
#include "sscmpc/types.hpp"

using namespace sscmpc;

namespace {
// 40-digit reference values
struct Ref {
    double y;
    double x;
};
constexpr Ref kRefs[] = {
    {0.1, 0.08885599049425769197428041166761577905853},
    {0.2, 0.1791434546212916866527257377537493589816},
    {0.5, 0.476936276204469873381418353643130559809},
    {0.6, 0.595116081449994821978121467040609781804},
    {0.8, 0.9061938024368233095359707952763153610744},
    {0.9, 1.16308715367667416284409543405470004838},
    {0.95, 1.385903824349677676633849604857752018291},
    {0.99, 1.821386367718449455872802051270319717557},
    {0.995, 1.984872612615532028709160226255752384349},
    {0.999, 2.326753765513524493866433697072306576442},
    {0.9999, 2.751063905712079691742593592581958300544},
};
}  // namespace

TEST_CASE("reference values to 1e-12 relative") {
    for (const Ref& r : kRefs) {
        CHECK(erf_inv(r.y) == doctest::Approx(r.x).epsilon(1e-12));
        CHECK(erf_inv(-r.y) == doctest::Approx(-r.x).epsilon(1e-12));
    }
    CHECK(erf_inv(0.0) == 0.0);
}

TEST_CASE("round trip through std::erf") {
    for (double y = -0.999; y < 1.0; y += 0.0137) {
        CHECK(std::erf(erf_inv(y)) == doctest::Approx(y).epsilon(1e-13));
    }
}

TEST_CASE("domain handling") {
    CHECK(std::isinf(erf_inv(1.0)));
    CHECK(std::isinf(erf_inv(-1.0)));
    CHECK(erf_inv(1.0) > 0.0);
    CHECK_THROWS_AS(erf_inv(1.5), DomainError);
    CHECK_THROWS_AS(erf_inv(-1.0000001), DomainError);
    CHECK_THROWS_AS(erf_inv(std::numeric_limits<double>::quiet_NaN()), DomainError);
}
