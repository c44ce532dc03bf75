#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hazopwb/guideword.hpp"
#include "hazopwb/kinematics.hpp"
#include "hazopwb/model.hpp"

namespace hazopwb {

// Sensor quantities a channel can carry. Detections reported through a
// target_present channel also carry the detection's lateral position
// (bearing is intrinsic to a detection); that does not add a quantity.
enum class Quantity {
    LaneLateralOffset,
    LaneCurvature,
    TargetRange,
    TargetRelativeVelocity,
    TargetClass,
    TargetPresent,
};

enum class TargetClass { Vehicle, Pedestrian, Static };

struct Segment {
    double length = 0.0;     // m
    double curvature = 0.0;  // 1/m, 0 = straight
    double lane_width = 3.5; // m
};

// Crossing trajectory: lateral(t) = initial_offset + rate * max(0, t - start_time).
struct LateralPath {
    double initial_offset = 0.0; // m
    double rate = 0.0;           // m/s, negative moves toward/through lane centre
    double start_time = 0.0;     // s
};

struct Target {
    TargetClass cls = TargetClass::Vehicle;
    double initial_gap = 0.0; // m ahead of ego at t=0
    double v = 0.0;           // m/s longitudinal
    std::optional<LateralPath> lateral_path;
};

struct EgoInit {
    double v = 0.0;
    double lateral_offset = 0.0;
};

struct Scenario {
    std::string id; // defaults to usecase_id when absent in the document
    std::string usecase_id;
    double duration = 0.0;
    double dt = 0.01;
    std::vector<Segment> road;
    EgoInit ego_init;
    std::vector<Target> targets;
    std::uint64_t seed = 0;
};

struct SensorChannel {
    std::string id;
    Modality source_modality = Modality::Radar; // camera or radar
    Quantity quantity = Quantity::TargetRange;
    double latency = 0.0;   // s
    double noise_sd = 0.0;  // per-quantity unit
    double range_max = 150.0; // m; 150 radar / 80 camera defaults applied at parse
    bool fov_check = true;
};

// Per-guideword fault parameters. Only the fields matching the guideword are
// consulted; parsing rejects keys that do not belong to the guideword.
struct MagnitudeBlock {
    double delta = 0.3;   // More/Less multiplicative bias on scalars
    int count = 2;        // More/Less detection count change on presence
    double delay = 0.0;   // Late: FIFO delay, s
    double shift = 0.0;   // Early: lookahead, s
    double period = 0.4;  // Intermittent square wave, s
    double duty = 0.5;    // Intermittent on-fraction
    int target_index = 0; // PartOf: which true target to drop
    TargetClass from_class = TargetClass::Pedestrian; // OtherThanInstead / flicker
    TargetClass to_class = TargetClass::Static;
};

struct InjectionSpec {
    std::string channel_id;
    Guideword guideword = Guideword::NoOrNot;
    double t_start = 0.0;
    std::optional<double> t_end; // absent = until end of run
    MagnitudeBlock magnitude;
    std::optional<Target> spurious_target; // AsWellAs only

    bool active_at(double t, double duration) const {
        return t >= t_start && t <= t_end.value_or(duration);
    }
};

struct TrackerConfig {
    bool discard_history_on_reclass = false;
    double history_horizon = 2.0; // s
};

enum class Classification {
    Success,
    LaneDeparture,
    Collision,
    LateralLimitViolation,
    MissedWarning,
    SpuriousResponse,
};

struct SimOutcome {
    std::string outcome_id;
    Classification classification = Classification::Success;
    std::optional<double> time_of_event;
    double min_gap = 9999.0; // finite sentinel when no target ever overlaps
    double max_abs_lateral_offset = 0.0;
    double max_abs_lateral_accel = 0.0; // lane-relative, |cmd - v^2 k|
    long plausibility_flags = 0;
    std::string trace_path; // empty when no trace written
};

struct ControllerConfig {
    double headway = 1.8;    // s
    double k_gap = 0.23;     // 1/s^2
    double k_v = 0.6;        // 1/s
    double k_set = 0.6;      // 1/s, set-speed hold
    double fcw_ttc = 2.5;    // s
    double aeb_ttc = 1.5;    // s
    double aeb_decel = 6.0;  // m/s^2
    double k_y = 0.8;        // 1/s^2
    double k_dy = 1.6;       // 1/s
    double accel_min = -9.81;
    double accel_max = 3.0;
    std::optional<double> set_speed; // default: ego initial speed
};

struct MonitorConfig {
    double hold_max = 0.5; // s a rejected channel may ride on the last accepted value
};

struct SimConfig {
    ControllerConfig controller;
    LateralLimits lateral;
    MonitorConfig monitor;
    double vehicle_width = 1.8;
    double in_path_half_width = 1.5; // lateral window for threat assessment
    double fov_cone = 0.35;          // |lateral| <= cone * gap visibility check
    double lane_loss_timeout = 0.5;  // s, full lane-sensing loss before termination
};

// Physical plausibility intervals used when no model parameter is bound.
std::map<Quantity, Interval> default_monitor_ranges();

// Structural checks; throws std::invalid_argument with a description on the
// first violated invariant (dt > 0, duration >= dt, lane wider than the
// vehicle, finite curvature, windows inside the run, known channels,
// guideword applicable to the channel's quantity).
void validate_scenario(const Scenario& sc, double vehicle_width = 1.8);
void validate_injections(const std::vector<InjectionSpec>& injections,
                         const std::vector<SensorChannel>& channels, const Scenario& sc);

std::string_view to_string(Quantity q);
std::string_view to_string(TargetClass c);
std::string_view to_string(Classification c);
std::optional<Quantity> parse_quantity(std::string_view s);
std::optional<TargetClass> parse_target_class(std::string_view s);
std::optional<Classification> parse_classification(std::string_view s);

// Severity order used for campaign summaries; higher is worse.
int classification_severity(Classification c);

} // namespace hazopwb
