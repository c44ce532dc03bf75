#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hazopwb/rng.hpp"
#include "hazopwb/scenario.hpp"

namespace hazopwb {

// --- plant -------------------------------------------------------------

struct PlantState {
    double s = 0.0;              // distance along road, m
    double v = 0.0;              // m/s
    double lateral_offset = 0.0; // m from lane centre
    double lateral_v = 0.0;      // m/s
};

struct Controls {
    double a_long = 0.0;    // m/s^2
    double a_lat_cmd = 0.0; // m/s^2
    bool fcw = false;
    bool aeb = false;
};

// Explicit first-order Euler step. Lane-relative lateral acceleration is
// a_lat_cmd - v^2 * curvature (the lane's centripetal demand); speed never
// goes negative. Commands are clamped to the configured bounds.
PlantState step_plant(const PlantState& state, const Controls& controls, const Segment& segment,
                      double dt, const SimConfig& cfg);

// --- ground truth ------------------------------------------------------

struct TruthTarget {
    int index = 0;
    double gap = 0.0;   // longitudinal to ego, m
    double rel_v = 0.0; // target v - ego v
    double lateral = 0.0;
    TargetClass cls = TargetClass::Vehicle;
};

struct GroundTruthFrame {
    double t = 0.0;
    double ego_v = 0.0;
    double ego_lateral = 0.0;
    double lane_curvature = 0.0;
    double lane_width = 3.5;
    std::vector<TruthTarget> targets;
};

// dt_ahead >= 0; ego extrapolated at constant velocity, targets exactly.
using LookaheadFn = std::function<GroundTruthFrame(double dt_ahead)>;

// --- measurements ------------------------------------------------------

// Ghost readings (spurious detections) use source <= kGhostBase.
inline constexpr int kGhostBase = -2;

struct SlotReading {
    int source = -1;  // scenario target index; kGhostBase - n for ghosts
    double value = 0.0;
    TargetClass cls = TargetClass::Vehicle;
    double lateral = 0.0;
};

struct Measurement {
    bool dropout = false; // whole-channel "no detection"
    std::vector<SlotReading> readings;

    bool no_detection() const { return dropout || readings.empty(); }
};

// One sensor channel's step-by-step measurement chain:
// visibility/range gating -> nominal noise -> active injections (in spec
// order) -> latency buffer. Stateful because Late keeps a FIFO and
// As-well-as ghosts advance over time.
class ChannelPipeline {
public:
    ChannelPipeline(SensorChannel spec, std::vector<InjectionSpec> injections,
                    std::uint64_t run_seed, double dt, double duration);

    Measurement sample(const GroundTruthFrame& now, const LookaheadFn& ahead);

    const SensorChannel& spec() const { return spec_; }

private:
    Measurement base_measurement(const GroundTruthFrame& frame);
    Measurement apply_injection(std::size_t idx, Measurement m, const GroundTruthFrame& now,
                                const LookaheadFn& ahead);

    SensorChannel spec_;
    std::vector<InjectionSpec> injections_;
    Rng rng_;
    double dt_;
    double duration_;
    std::vector<double> intermittent_phase_;        // per injection
    std::vector<std::deque<Measurement>> history_;  // per Late injection
    std::vector<std::optional<double>> ghost_gap_;  // per AsWellAs injection
    std::deque<Measurement> latency_buffer_;
};

// --- plausibility monitor ----------------------------------------------

struct MonitorDecision {
    bool accepted = true;
    std::string reason; // "below-physical-min" / "above-physical-max"
};

MonitorDecision plausibility_check(double value, const Interval& range);

// Stateful gate over scalar channels: rejected samples ride on the last
// accepted value for at most hold_max seconds, then the reading drops out.
class PlausibilityMonitor {
public:
    PlausibilityMonitor(MonitorConfig cfg, std::map<Quantity, Interval> ranges)
        : cfg_(cfg), ranges_(std::move(ranges)) {}

    // Mutates the measurement; returns the number of rejected samples.
    int apply(const std::string& channel_id, Quantity quantity, Measurement& m, double t);

private:
    struct Hold {
        double value = 0.0;
        double accepted_at = 0.0;
        bool has_value = false;
    };
    MonitorConfig cfg_;
    std::map<Quantity, Interval> ranges_;
    std::map<std::pair<std::string, int>, Hold> holds_;
};

// --- perception assembly & tracking --------------------------------------

struct PerceivedTarget {
    int source = -1;
    std::optional<double> measured_gap; // absent: tracker dead-reckons the position
    std::optional<double> rel_v;
    std::optional<TargetClass> cls;
    double lateral = 0.0;
};

struct LaneEstimate {
    std::optional<double> offset;
    double offset_rate = 0.0;
    std::optional<double> curvature;
};

struct PerceivedFrame {
    LaneEstimate lane;
    std::vector<PerceivedTarget> targets;
    bool has_lane_channel = false;
    bool lane_available = false;
};

struct TrackState {
    int source = -1;
    double gap_est = 0.0;
    double rel_v_est = 0.0;
    bool rel_v_valid = false;
    double lateral_est = 0.0;
    double lateral_rate_est = 0.0; // least-squares over the history horizon
    std::optional<TargetClass> cls;
    bool coasted = false;

    // Linear extrapolation of the crossing path.
    double predicted_lateral(double horizon) const {
        return lateral_est + lateral_rate_est * horizon;
    }
};

// Per-target history with least-squares velocity estimation. When
// discard_history_on_reclass is set, a class-label change wipes the
// target's history and the path prediction degenerates to stationary until
// two samples accumulate again.
class Tracker {
public:
    explicit Tracker(TrackerConfig cfg) : cfg_(cfg) {}

    std::vector<TrackState> update(double t, const PerceivedFrame& frame);

private:
    struct Track {
        std::deque<std::pair<double, double>> gap_samples;
        std::deque<std::pair<double, double>> lat_samples;
        std::optional<TargetClass> last_cls;
        double coast_gap = 0.0;
        double coast_rate = 0.0;
        double coast_from = 0.0;
        bool coasting = false;
    };
    TrackerConfig cfg_;
    std::map<int, Track> tracks_;
};

// --- controllers ---------------------------------------------------------

struct ControllerMemory {
    bool aeb_latched = false;
    bool fcw_ever = false;
    std::optional<double> first_fcw_t;
    std::optional<double> first_aeb_t;
    std::optional<double> prev_lane_offset;
    double prev_lane_offset_t = 0.0;
};

// Longitudinal: following law min'd with set-speed hold; automatic emergency
// braking replaces the command outright and latches until the run ends.
// Lateral: PD on lane offset plus v^2*curvature feedforward, clamped to the
// nominal lateral limit; no offset measurement means no lateral command.
Controls run_controllers(double t, double ego_v, const std::vector<TrackState>& targets,
                         const LaneEstimate& lane, const SimConfig& cfg, double set_speed,
                         ControllerMemory& mem);

// --- run -----------------------------------------------------------------

struct RunInputs {
    Scenario scenario;
    std::vector<SensorChannel> channels;
    std::vector<InjectionSpec> injections;
    TrackerConfig tracker;
    bool monitor_enabled = false;
    SimConfig config;
    std::map<Quantity, Interval> monitor_ranges = default_monitor_ranges();
    std::string outcome_id;
    std::string trace_path; // empty: no trace file
};

// Deterministic closed-loop run; identical inputs produce bit-identical
// traces. Throws std::invalid_argument if the scenario or injections are
// structurally invalid.
SimOutcome run_scenario(const RunInputs& inputs);

// Trace CSV column header (fixed order, 9 decimal digits, LF endings).
std::string trace_header();

} // namespace hazopwb
