#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

#include "hazopwb/simulator.hpp"

namespace hazopwb {

PlantState step_plant(const PlantState& state, const Controls& controls, const Segment& segment,
                      double dt, const SimConfig& cfg) {
    if (dt <= 0.0) throw std::invalid_argument("step_plant: dt must be positive");
    const double a_long =
        std::clamp(controls.a_long, cfg.controller.accel_min, cfg.controller.accel_max);
    const double a_lat_cmd =
        std::clamp(controls.a_lat_cmd, -cfg.lateral.emergency_max, cfg.lateral.emergency_max);
    const double a_lat_actual = a_lat_cmd - state.v * state.v * segment.curvature;

    PlantState next;
    next.s = state.s + state.v * dt;
    next.v = std::max(0.0, state.v + a_long * dt);
    next.lateral_offset = state.lateral_offset + state.lateral_v * dt;
    next.lateral_v = state.lateral_v + a_lat_actual * dt;
    return next;
}

Controls run_controllers(double t, double ego_v, const std::vector<TrackState>& targets,
                         const LaneEstimate& lane, const SimConfig& cfg, double set_speed,
                         ControllerMemory& mem) {
    const ControllerConfig& cc = cfg.controller;
    Controls out;

    // Longitudinal: set-speed hold, tightened by the following law when a
    // forward vehicle is tracked in the ego lane.
    const double a_set = cc.k_set * (set_speed - ego_v);
    double a_long = a_set;

    const TrackState* lead = nullptr;
    for (const auto& target : targets) {
        if (target.gap_est <= 0.0) continue;
        if (std::fabs(target.lateral_est) > cfg.in_path_half_width) continue;
        if (target.cls && *target.cls != TargetClass::Vehicle) continue;
        if (!lead || target.gap_est < lead->gap_est) lead = &target;
    }
    if (lead) {
        const double rel_v = lead->rel_v_valid ? lead->rel_v_est : 0.0;
        const double a_follow = cc.k_gap * (lead->gap_est - cc.headway * ego_v) + cc.k_v * rel_v;
        a_long = std::min(a_set, a_follow);
    }

    // Threat assessment for warning and emergency braking: any class, in
    // path now or predicted in path at time of arrival.
    bool fcw = false;
    bool aeb_fire = false;
    for (const auto& target : targets) {
        if (target.gap_est <= 0.0) continue;
        if (!target.rel_v_valid || target.rel_v_est >= 0.0) continue; // not closing
        const double closing = -target.rel_v_est;
        const double ttc = target.gap_est / closing;
        const bool in_path_now = std::fabs(target.lateral_est) <= cfg.in_path_half_width;
        const bool in_path_at_arrival =
            std::fabs(target.predicted_lateral(ttc)) <= cfg.in_path_half_width;
        if (!in_path_now && !in_path_at_arrival) continue;
        if (ttc < cc.fcw_ttc) fcw = true;
        if (ttc < cc.aeb_ttc) aeb_fire = true;
    }

    if (fcw) {
        mem.fcw_ever = true;
        if (!mem.first_fcw_t) mem.first_fcw_t = t;
    }
    if (aeb_fire && !mem.aeb_latched) {
        mem.aeb_latched = true;
        mem.first_aeb_t = t;
    }
    if (mem.aeb_latched) a_long = -cc.aeb_decel;

    out.a_long = std::clamp(a_long, cc.accel_min, cc.accel_max);
    out.fcw = fcw;
    out.aeb = mem.aeb_latched;

    // Lateral: centring needs the offset measurement; curvature feeds
    // forward the lane's centripetal demand.
    double rate = 0.0;
    if (lane.offset) {
        rate = lane.offset_rate;
        const double feedforward =
            lane.curvature ? ego_v * ego_v * (*lane.curvature) : 0.0;
        const double a_lat = -cc.k_y * (*lane.offset) - cc.k_dy * rate + feedforward;
        out.a_lat_cmd = std::clamp(a_lat, -cfg.lateral.nominal_max, cfg.lateral.nominal_max);
    } else {
        out.a_lat_cmd = 0.0;
    }
    return out;
}

std::string trace_header() {
    return "t,s,v,lateral_offset,lateral_accel_cmd,lateral_accel_actual,gap_true,gap_est,"
           "rel_v_est,target_class_est,fcw,aeb,plausibility_reject";
}

namespace {

bool is_lane_quantity(Quantity q) {
    return q == Quantity::LaneLateralOffset || q == Quantity::LaneCurvature;
}

bool is_scalar_quantity(Quantity q) {
    return is_lane_quantity(q) || q == Quantity::TargetRange ||
           q == Quantity::TargetRelativeVelocity;
}

const Segment& segment_at(const std::vector<Segment>& road, double s) {
    double start = 0.0;
    for (const auto& seg : road) {
        if (s < start + seg.length) return seg;
        start += seg.length;
    }
    return road.back(); // past the declared road: last segment continues
}

struct TargetKinematics {
    double position(const Target& target, int index, double t) const {
        (void)index;
        return target.initial_gap + target.v * t;
    }
    double lateral(const Target& target, double t) const {
        if (!target.lateral_path) return 0.0;
        const LateralPath& path = *target.lateral_path;
        return path.initial_offset + path.rate * std::max(0.0, t - path.start_time);
    }
};

struct ChannelSet {
    std::vector<ChannelPipeline> pipelines;
    bool has_lane = false;
    bool has_presence = false;
    bool has_class = false;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    return buf;
}

} // namespace

SimOutcome run_scenario(const RunInputs& in) {
    const Scenario& sc = in.scenario;
    const SimConfig& cfg = in.config;
    validate_scenario(sc, cfg.vehicle_width);
    validate_injections(in.injections, in.channels, sc);

    ChannelSet channels;
    for (const auto& ch : in.channels) {
        std::vector<InjectionSpec> mine;
        for (const auto& inj : in.injections) {
            if (inj.channel_id == ch.id) mine.push_back(inj);
        }
        channels.pipelines.emplace_back(ch, std::move(mine), sc.seed, sc.dt, sc.duration);
        if (is_lane_quantity(ch.quantity)) channels.has_lane = true;
        if (ch.quantity == Quantity::TargetPresent) channels.has_presence = true;
        if (ch.quantity == Quantity::TargetClass) channels.has_class = true;
    }

    PlausibilityMonitor monitor(cfg.monitor, in.monitor_ranges);
    Tracker tracker(in.tracker);
    ControllerMemory mem;
    TargetKinematics kin;

    PlantState state;
    state.v = sc.ego_init.v;
    state.lateral_offset = sc.ego_init.lateral_offset;
    const double set_speed = cfg.controller.set_speed.value_or(sc.ego_init.v);

    std::ofstream trace;
    if (!in.trace_path.empty()) {
        trace.open(in.trace_path, std::ios::binary); // LF endings regardless of platform
        if (!trace) throw std::invalid_argument("cannot open trace path '" + in.trace_path + "'");
        trace << trace_header() << "\n";
    }

    SimOutcome outcome;
    outcome.outcome_id = in.outcome_id.empty() ? sc.id : in.outcome_id;
    outcome.trace_path = in.trace_path;

    auto truth_at = [&](double t, const PlantState& st) {
        GroundTruthFrame frame;
        frame.t = t;
        frame.ego_v = st.v;
        frame.ego_lateral = st.lateral_offset;
        const Segment& seg = segment_at(sc.road, st.s);
        frame.lane_curvature = seg.curvature;
        frame.lane_width = seg.lane_width;
        for (std::size_t i = 0; i < sc.targets.size(); ++i) {
            const Target& target = sc.targets[i];
            TruthTarget tt;
            tt.index = static_cast<int>(i);
            tt.gap = kin.position(target, tt.index, t) - st.s;
            tt.rel_v = target.v - st.v;
            tt.lateral = kin.lateral(target, t);
            tt.cls = target.cls;
            frame.targets.push_back(tt);
        }
        return frame;
    };

    const long steps = std::lround(sc.duration / sc.dt);
    double lane_lost_since = -1.0;
    bool terminal_missed_warning = false;
    bool limit_violated = false;
    std::optional<double> limit_t;
    bool spurious = false;
    std::optional<double> spurious_t;
    bool collided = false;
    std::optional<double> collision_t;
    bool departed = false;
    std::optional<double> departure_t;

    for (long k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * sc.dt;
        const GroundTruthFrame now = truth_at(t, state);
        LookaheadFn ahead = [&](double dt_ahead) {
            PlantState projected = state;
            projected.s += state.v * dt_ahead;
            return truth_at(t + dt_ahead, projected);
        };

        // Sense every channel, gate through the monitor, assemble the frame.
        PerceivedFrame frame;
        frame.has_lane_channel = channels.has_lane;
        int rejects_this_step = 0;

        struct Slot {
            double snapshot_gap = 0.0;
            TargetClass snapshot_cls = TargetClass::Vehicle;
            double lateral = 0.0;
            std::optional<double> measured_gap;
            std::optional<double> rel_v;
            std::optional<TargetClass> cls;
            bool ghost = false;
        };
        std::map<int, Slot> slots;

        std::map<int, double> range_readings;
        std::map<int, double> relv_readings;
        std::map<int, TargetClass> class_readings;

        for (auto& pipeline : channels.pipelines) {
            Measurement m = pipeline.sample(now, ahead);
            const Quantity q = pipeline.spec().quantity;
            if (in.monitor_enabled && is_scalar_quantity(q)) {
                rejects_this_step += monitor.apply(pipeline.spec().id, q, m, t);
            }
            switch (q) {
            case Quantity::LaneLateralOffset:
                if (!m.no_detection()) {
                    frame.lane.offset = m.readings.front().value;
                    frame.lane_available = true;
                }
                break;
            case Quantity::LaneCurvature:
                if (!m.no_detection()) {
                    frame.lane.curvature = m.readings.front().value;
                    frame.lane_available = true;
                }
                break;
            case Quantity::TargetPresent:
                if (!m.dropout) {
                    for (const auto& r : m.readings) {
                        Slot& slot = slots[r.source];
                        slot.snapshot_gap = r.value;
                        slot.snapshot_cls = r.cls;
                        slot.lateral = r.lateral;
                        slot.ghost = r.source <= kGhostBase;
                    }
                }
                break;
            case Quantity::TargetRange:
                for (const auto& r : m.readings) range_readings[r.source] = r.value;
                break;
            case Quantity::TargetRelativeVelocity:
                for (const auto& r : m.readings) relv_readings[r.source] = r.value;
                break;
            case Quantity::TargetClass:
                for (const auto& r : m.readings) class_readings[r.source] = r.cls;
                break;
            }
        }

        if (!channels.has_presence) {
            // Without a detection channel, a range reading implies detection.
            for (const auto& [source, gap] : range_readings) {
                Slot& slot = slots[source];
                slot.snapshot_gap = gap;
                for (const auto& tt : now.targets) {
                    if (tt.index == source) {
                        slot.lateral = tt.lateral;
                        slot.snapshot_cls = tt.cls;
                    }
                }
            }
        }

        for (auto& [source, slot] : slots) {
            PerceivedTarget pt;
            pt.source = source;
            pt.lateral = slot.lateral;
            if (slot.ghost) {
                pt.measured_gap = slot.snapshot_gap;
                pt.cls = slot.snapshot_cls;
            } else {
                auto range_it = range_readings.find(source);
                if (range_it != range_readings.end()) pt.measured_gap = range_it->second;
                auto relv_it = relv_readings.find(source);
                if (relv_it != relv_readings.end()) pt.rel_v = relv_it->second;
                if (channels.has_class) {
                    auto cls_it = class_readings.find(source);
                    if (cls_it == class_readings.end()) {
                        // Detected but not classified: presence is rejected.
                        continue;
                    }
                    pt.cls = cls_it->second;
                }
            }
            frame.targets.push_back(pt);
        }

        // Full lane-sensing loss ends the run: without any lane estimate the
        // system would hand control back, which is outside this model.
        if (channels.has_lane) {
            if (frame.lane_available) {
                lane_lost_since = -1.0;
            } else if (lane_lost_since < 0.0) {
                lane_lost_since = t;
            }
            if (lane_lost_since >= 0.0 && t - lane_lost_since > cfg.lane_loss_timeout) {
                terminal_missed_warning = true;
                outcome.time_of_event = t;
                break;
            }
        }

        // Lane offset rate from consecutive measurements.
        if (frame.lane.offset) {
            if (mem.prev_lane_offset && t > mem.prev_lane_offset_t) {
                frame.lane.offset_rate =
                    (*frame.lane.offset - *mem.prev_lane_offset) / (t - mem.prev_lane_offset_t);
            }
            mem.prev_lane_offset = frame.lane.offset;
            mem.prev_lane_offset_t = t;
        }

        const std::vector<TrackState> tracks = tracker.update(t, frame);
        const bool aeb_before = mem.aeb_latched;
        const Controls controls =
            run_controllers(t, state.v, tracks, frame.lane, cfg, set_speed, mem);

        if (!aeb_before && mem.aeb_latched) {
            // Emergency braking with nothing real ahead is itself a hazard.
            const double stopping = state.v * state.v / (2.0 * cfg.controller.aeb_decel);
            bool real_target_near = false;
            for (const auto& tt : now.targets) {
                if (tt.gap >= 0.0 && tt.gap <= 2.0 * stopping) real_target_near = true;
            }
            if (!real_target_near) {
                spurious = true;
                spurious_t = t;
            }
        }

        const double a_lat_cmd =
            std::clamp(controls.a_lat_cmd, -cfg.lateral.emergency_max, cfg.lateral.emergency_max);
        const double a_lat_actual = a_lat_cmd - state.v * state.v * now.lane_curvature;

        // Trace: state at t plus the commands computed from it.
        if (trace.is_open()) {
            std::optional<double> gap_true;
            for (const auto& tt : now.targets) {
                if (tt.gap > 0.0 && (!gap_true || tt.gap < *gap_true)) gap_true = tt.gap;
            }
            const TrackState* primary = nullptr;
            for (const auto& track : tracks) {
                auto better = [](const TrackState& a, const TrackState* b) {
                    if (!b) return true;
                    const double ka = a.gap_est > 0.0 ? a.gap_est : 1e6 - a.gap_est;
                    const double kb = b->gap_est > 0.0 ? b->gap_est : 1e6 - b->gap_est;
                    return ka < kb;
                };
                if (better(track, primary)) primary = &track;
            }
            trace << fmt(t) << ',' << fmt(state.s) << ',' << fmt(state.v) << ','
                  << fmt(state.lateral_offset) << ',' << fmt(a_lat_cmd) << ','
                  << fmt(a_lat_actual) << ',' << (gap_true ? fmt(*gap_true) : "") << ','
                  << (primary ? fmt(primary->gap_est) : "") << ','
                  << (primary && primary->rel_v_valid ? fmt(primary->rel_v_est) : "") << ','
                  << (primary && primary->cls ? std::string(to_string(*primary->cls)) : "")
                  << ',' << (controls.fcw ? 1 : 0) << ',' << (controls.aeb ? 1 : 0) << ','
                  << rejects_this_step << "\n";
        }

        // Metrics and terminal conditions on the true state.
        outcome.plausibility_flags += rejects_this_step;
        outcome.max_abs_lateral_offset =
            std::max(outcome.max_abs_lateral_offset, std::fabs(state.lateral_offset));
        outcome.max_abs_lateral_accel =
            std::max(outcome.max_abs_lateral_accel, std::fabs(a_lat_actual));

        for (const auto& tt : now.targets) {
            const bool overlap =
                std::fabs(tt.lateral - state.lateral_offset) < cfg.vehicle_width;
            if (!overlap) continue;
            outcome.min_gap = std::min(outcome.min_gap, tt.gap);
            if (tt.gap <= 0.0) {
                collided = true;
                collision_t = t;
            }
        }
        if (collided) {
            outcome.time_of_event = collision_t;
            break;
        }
        if (std::fabs(state.lateral_offset) > now.lane_width / 2.0 - cfg.vehicle_width / 2.0) {
            departed = true;
            departure_t = t;
            outcome.time_of_event = t;
            break;
        }
        if (std::fabs(a_lat_actual) > cfg.lateral.emergency_max && !limit_violated) {
            limit_violated = true;
            limit_t = t;
        }

        state = step_plant(state, controls, segment_at(sc.road, state.s), sc.dt, cfg);
    }

    if (collided) {
        outcome.classification = Classification::Collision;
        outcome.time_of_event = collision_t;
    } else if (departed) {
        outcome.classification = Classification::LaneDeparture;
        outcome.time_of_event = departure_t;
    } else if (limit_violated) {
        outcome.classification = Classification::LateralLimitViolation;
        outcome.time_of_event = limit_t;
    } else if (spurious) {
        outcome.classification = Classification::SpuriousResponse;
        outcome.time_of_event = spurious_t;
    } else if (terminal_missed_warning) {
        outcome.classification = Classification::MissedWarning;
    } else {
        outcome.classification = Classification::Success;
        outcome.time_of_event.reset();
    }
    return outcome;
}

} // namespace hazopwb
