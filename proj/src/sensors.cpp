#include <algorithm>
#include <cmath>

#include "hazopwb/simulator.hpp"

namespace hazopwb {

namespace {

bool is_lane_quantity(Quantity q) {
    return q == Quantity::LaneLateralOffset || q == Quantity::LaneCurvature;
}

bool is_scalar_quantity(Quantity q) {
    return q == Quantity::LaneLateralOffset || q == Quantity::LaneCurvature ||
           q == Quantity::TargetRange || q == Quantity::TargetRelativeVelocity;
}

// Field-of-view approximated as a cone: a target is visible while its
// lateral offset stays under this fraction of its gap (about +-19 deg).
constexpr double kFovCone = 0.35;

} // namespace

ChannelPipeline::ChannelPipeline(SensorChannel spec, std::vector<InjectionSpec> injections,
                                 std::uint64_t run_seed, double dt, double duration)
    : spec_(std::move(spec)),
      injections_(std::move(injections)),
      rng_(fnv1a64_mix(fnv1a64(spec_.id), run_seed)),
      dt_(dt),
      duration_(duration) {
    intermittent_phase_.resize(injections_.size(), 0.0);
    history_.resize(injections_.size());
    ghost_gap_.resize(injections_.size());
    for (std::size_t i = 0; i < injections_.size(); ++i) {
        if (injections_[i].guideword == Guideword::Intermittent) {
            intermittent_phase_[i] = rng_.next_unit() * injections_[i].magnitude.period;
        }
    }
}

Measurement ChannelPipeline::base_measurement(const GroundTruthFrame& frame) {
    Measurement m;
    if (is_lane_quantity(spec_.quantity)) {
        SlotReading r;
        r.source = -1;
        r.value = spec_.quantity == Quantity::LaneLateralOffset ? frame.ego_lateral
                                                                : frame.lane_curvature;
        if (spec_.noise_sd > 0.0) r.value += rng_.next_gaussian(0.0, spec_.noise_sd);
        m.readings.push_back(r);
        return m;
    }
    for (const auto& target : frame.targets) {
        if (target.gap <= 0.0 || target.gap > spec_.range_max) continue;
        if (spec_.fov_check &&
            std::fabs(target.lateral - frame.ego_lateral) > kFovCone * target.gap)
            continue;
        SlotReading r;
        r.source = target.index;
        r.cls = target.cls;
        r.lateral = target.lateral;
        switch (spec_.quantity) {
        case Quantity::TargetRange: r.value = target.gap; break;
        case Quantity::TargetRelativeVelocity: r.value = target.rel_v; break;
        case Quantity::TargetPresent: r.value = target.gap; break; // detection snapshot
        case Quantity::TargetClass: break;
        default: break;
        }
        if (is_scalar_quantity(spec_.quantity) && spec_.noise_sd > 0.0) {
            r.value += rng_.next_gaussian(0.0, spec_.noise_sd);
        }
        m.readings.push_back(r);
    }
    return m;
}

Measurement ChannelPipeline::apply_injection(std::size_t idx, Measurement m,
                                             const GroundTruthFrame& now,
                                             const LookaheadFn& ahead) {
    const InjectionSpec& inj = injections_[idx];
    const MagnitudeBlock& mag = inj.magnitude;
    const bool active = inj.active_at(now.t, duration_);

    // Late records its input stream unconditionally so the delayed view is
    // defined even for a window that starts mid-run.
    if (inj.guideword == Guideword::Late) {
        auto& hist = history_[idx];
        hist.push_back(m);
        const std::size_t steps = static_cast<std::size_t>(std::llround(mag.delay / dt_));
        while (hist.size() > steps + 1) hist.pop_front();
        if (!active) return m;
        if (hist.size() > steps) return hist[hist.size() - 1 - steps];
        Measurement delayed;
        delayed.dropout = true;
        return delayed;
    }

    if (inj.guideword == Guideword::AsWellAs) {
        if (!active) {
            ghost_gap_[idx].reset();
            return m;
        }
        const Target& sp = *inj.spurious_target;
        if (!ghost_gap_[idx]) {
            ghost_gap_[idx] = sp.initial_gap;
        } else {
            *ghost_gap_[idx] += (sp.v - now.ego_v) * dt_;
        }
        SlotReading ghost;
        ghost.source = kGhostBase - static_cast<int>(idx) * 8;
        ghost.value = *ghost_gap_[idx];
        ghost.cls = sp.cls;
        ghost.lateral = sp.lateral_path ? sp.lateral_path->initial_offset : 0.0;
        if (!m.dropout && ghost.value > 0.0 && ghost.value <= spec_.range_max) {
            m.readings.push_back(ghost);
        }
        return m;
    }

    if (!active) return m;

    switch (inj.guideword) {
    case Guideword::NoOrNot:
        m.dropout = true;
        m.readings.clear();
        break;

    case Guideword::More:
        if (spec_.quantity == Quantity::TargetPresent) {
            // Ghost echoes of the nearest detection, spaced behind it.
            if (!m.no_detection()) {
                const auto nearest = std::min_element(
                    m.readings.begin(), m.readings.end(),
                    [](const SlotReading& a, const SlotReading& b) { return a.value < b.value; });
                const SlotReading base = *nearest;
                for (int j = 0; j < mag.count; ++j) {
                    SlotReading ghost = base;
                    ghost.source = kGhostBase - static_cast<int>(idx) * 8 - (j + 1);
                    ghost.value = base.value + 6.0 * (j + 1);
                    if (ghost.value <= spec_.range_max) m.readings.push_back(ghost);
                }
            }
        } else {
            for (auto& r : m.readings) r.value *= (1.0 + mag.delta);
        }
        break;

    case Guideword::Less:
        if (spec_.quantity == Quantity::TargetPresent) {
            for (int j = 0; j < mag.count && !m.readings.empty(); ++j) {
                auto farthest = std::max_element(
                    m.readings.begin(), m.readings.end(),
                    [](const SlotReading& a, const SlotReading& b) { return a.value < b.value; });
                m.readings.erase(farthest);
            }
        } else {
            for (auto& r : m.readings) r.value *= (1.0 - mag.delta);
        }
        break;

    case Guideword::PartOf:
        std::erase_if(m.readings,
                      [&](const SlotReading& r) { return r.source == mag.target_index; });
        break;

    case Guideword::OtherThanInstead:
        for (auto& r : m.readings) {
            if (r.cls == mag.from_class) r.cls = mag.to_class;
        }
        break;

    case Guideword::Reverse:
        for (auto& r : m.readings) r.value = -r.value;
        break;

    case Guideword::Early:
        m = base_measurement(ahead(mag.shift));
        break;

    case Guideword::Intermittent: {
        const double x =
            std::fmod(now.t - inj.t_start + intermittent_phase_[idx], mag.period);
        const bool on = x < mag.duty * mag.period;
        if (!on) {
            if (spec_.quantity == Quantity::TargetClass) {
                for (auto& r : m.readings) {
                    if (r.cls == mag.from_class) r.cls = mag.to_class;
                }
            } else {
                m.dropout = true;
                m.readings.clear();
            }
        }
        break;
    }

    case Guideword::Late:
    case Guideword::AsWellAs:
        break; // handled above
    }
    return m;
}

Measurement ChannelPipeline::sample(const GroundTruthFrame& now, const LookaheadFn& ahead) {
    Measurement m = base_measurement(now);
    for (std::size_t i = 0; i < injections_.size(); ++i) {
        m = apply_injection(i, std::move(m), now, ahead);
    }
    if (spec_.latency > 0.0) {
        latency_buffer_.push_back(m);
        const std::size_t steps = static_cast<std::size_t>(std::llround(spec_.latency / dt_));
        while (latency_buffer_.size() > steps + 1) latency_buffer_.pop_front();
        if (latency_buffer_.size() > steps) return latency_buffer_[latency_buffer_.size() - 1 - steps];
        Measurement empty;
        empty.dropout = true;
        return empty;
    }
    return m;
}

MonitorDecision plausibility_check(double value, const Interval& range) {
    if (value < range.min) return {false, "below-physical-min"};
    if (value > range.max) return {false, "above-physical-max"};
    return {true, {}};
}

int PlausibilityMonitor::apply(const std::string& channel_id, Quantity quantity, Measurement& m,
                               double t) {
    auto range_it = ranges_.find(quantity);
    if (range_it == ranges_.end()) return 0;
    int rejects = 0;
    std::vector<SlotReading> kept;
    kept.reserve(m.readings.size());
    for (auto& r : m.readings) {
        const MonitorDecision decision = plausibility_check(r.value, range_it->second);
        auto& hold = holds_[{channel_id, r.source}];
        if (decision.accepted) {
            hold = {r.value, t, true};
            kept.push_back(r);
            continue;
        }
        ++rejects;
        if (hold.has_value && (t - hold.accepted_at) <= cfg_.hold_max) {
            SlotReading held = r;
            held.value = hold.value;
            kept.push_back(held);
        }
        // else: stale beyond hold_max, reading degrades to no detection
    }
    m.readings = std::move(kept);
    return rejects;
}

} // namespace hazopwb
