#pragma once

#include <cmath>
#include <stdexcept>

namespace hazopwb {

// Regulatory bounds on lateral acceleration for automatically commanded
// steering. Defaults follow the 3 m/s^2 nominal / 5 m/s^2 emergency split;
// both are configurable because published figures differ between sources.
struct LateralLimits {
    double nominal_max = 3.0;   // m/s^2
    double emergency_max = 5.0; // m/s^2

    bool valid() const { return nominal_max > 0.0 && nominal_max <= emergency_max; }
};

enum class Regime { Nominal, Emergency };

struct LimitCheck {
    bool within;
    double excess; // |a| - limit when violated, 0 otherwise
};

// a = v^2 / r. Straight segments are represented by curvature 0 upstream,
// never by an infinite radius here.
inline double lateral_accel(double v, double r) {
    if (r <= 0.0) throw std::invalid_argument("lateral_accel: radius must be positive");
    if (v < 0.0) throw std::invalid_argument("lateral_accel: speed must be nonnegative");
    return v * v / r;
}

// Largest speed keeping lateral acceleration at or below a_max on radius r.
inline double max_speed_for_radius(double r, double a_max) {
    if (r <= 0.0) throw std::invalid_argument("max_speed_for_radius: radius must be positive");
    if (a_max <= 0.0) throw std::invalid_argument("max_speed_for_radius: limit must be positive");
    return std::sqrt(a_max * r);
}

// Boundary-inclusive: |a| equal to the limit passes.
inline LimitCheck check_limit(double a, const LateralLimits& limits, Regime regime) {
    if (!limits.valid()) throw std::invalid_argument("check_limit: invalid limits");
    const double bound = regime == Regime::Nominal ? limits.nominal_max : limits.emergency_max;
    const double mag = std::fabs(a);
    if (mag <= bound) return {true, 0.0};
    return {false, mag - bound};
}

} // namespace hazopwb
