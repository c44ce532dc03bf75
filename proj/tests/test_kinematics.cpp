#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hazopwb/kinematics.hpp"

using namespace hazopwb;

namespace {
bool rel_close(double a, double b, double tol = 1e-9) {
    return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(b));
}
} // namespace

TEST_CASE("lateral acceleration v^2/r") {
    CHECK(rel_close(lateral_accel(20.0, 200.0), 2.0));
    CHECK(lateral_accel(0.0, 50.0) == 0.0);
    CHECK(rel_close(lateral_accel(25.0, 125.0), 5.0));
    CHECK_THROWS_AS(lateral_accel(10.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(lateral_accel(10.0, -5.0), std::invalid_argument);
    CHECK_THROWS_AS(lateral_accel(-1.0, 5.0), std::invalid_argument);
}

TEST_CASE("max speed for radius") {
    CHECK(rel_close(max_speed_for_radius(125.0, 5.0), 25.0));
    CHECK(rel_close(max_speed_for_radius(300.0, 3.0), 30.0));
    CHECK_THROWS_AS(max_speed_for_radius(0.0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(max_speed_for_radius(100.0, 0.0), std::invalid_argument);
}

TEST_CASE("max speed scales with sqrt of the limit") {
    for (double r : {30.0, 125.0, 400.0, 1000.0}) {
        for (double a : {0.5, 2.0, 3.0, 5.0}) {
            for (double k : {0.5, 2.0, 3.0}) {
                CHECK(rel_close(max_speed_for_radius(r, k * k * a),
                                k * max_speed_for_radius(r, a), 1e-12));
            }
        }
    }
}

TEST_CASE("lateral acceleration is scale invariant under (kv, k^2 r)") {
    for (double v : {1.0, 8.0, 20.0, 33.0}) {
        for (double r : {20.0, 125.0, 900.0}) {
            for (double k : {0.25, 2.0, 7.0}) {
                CHECK(rel_close(lateral_accel(k * v, k * k * r), lateral_accel(v, r), 1e-12));
            }
        }
    }
}

TEST_CASE("limit checks are boundary inclusive") {
    const LateralLimits limits;
    CHECK(check_limit(2.0, limits, Regime::Nominal).within);

    const LimitCheck over = check_limit(3.2, limits, Regime::Nominal);
    CHECK_FALSE(over.within);
    CHECK(rel_close(over.excess, 0.2, 1e-9));

    CHECK(check_limit(-5.0, limits, Regime::Emergency).within); // |a| equals the limit
    CHECK(check_limit(3.0, limits, Regime::Nominal).within);
    CHECK_FALSE(check_limit(5.0 + 1e-6, limits, Regime::Emergency).within);
}

TEST_CASE("round trip: speed at the limit stays within the limit") {
    const LateralLimits limits;
    for (double r : {50.0, 125.0, 300.0, 800.0}) {
        const double v_nom = max_speed_for_radius(r, limits.nominal_max);
        CHECK(check_limit(lateral_accel(v_nom, r), limits, Regime::Nominal).within);
        const double v_em = max_speed_for_radius(r, limits.emergency_max);
        CHECK(check_limit(lateral_accel(v_em, r), limits, Regime::Emergency).within);
    }
}

TEST_CASE("invalid limits are rejected") {
    LateralLimits bad;
    bad.nominal_max = 6.0;
    bad.emergency_max = 5.0;
    CHECK_FALSE(bad.valid());
    CHECK_THROWS_AS(check_limit(1.0, bad, Regime::Nominal), std::invalid_argument);
}
