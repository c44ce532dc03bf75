#include <algorithm>
#include <cmath>

#include "hazopwb/simulator.hpp"

namespace hazopwb {

namespace {

// Least-squares slope of (t, x) samples; needs at least two points.
std::optional<double> lsq_slope(const std::deque<std::pair<double, double>>& samples) {
    const std::size_t n = samples.size();
    if (n < 2) return std::nullopt;
    double st = 0.0, sx = 0.0;
    for (const auto& [t, x] : samples) {
        st += t;
        sx += x;
    }
    const double mt = st / static_cast<double>(n);
    const double mx = sx / static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (const auto& [t, x] : samples) {
        num += (t - mt) * (x - mx);
        den += (t - mt) * (t - mt);
    }
    if (den <= 0.0) return std::nullopt;
    return num / den;
}

void trim(std::deque<std::pair<double, double>>& samples, double t, double horizon) {
    while (!samples.empty() && samples.front().first < t - horizon) samples.pop_front();
}

} // namespace

std::vector<TrackState> Tracker::update(double t, const PerceivedFrame& frame) {
    std::vector<TrackState> out;
    out.reserve(frame.targets.size());

    for (const auto& pt : frame.targets) {
        Track& track = tracks_[pt.source];

        if (cfg_.discard_history_on_reclass && track.last_cls && pt.cls &&
            *track.last_cls != *pt.cls) {
            track.gap_samples.clear();
            track.lat_samples.clear();
        }
        if (pt.cls) track.last_cls = pt.cls;

        track.lat_samples.emplace_back(t, pt.lateral);
        trim(track.lat_samples, t, cfg_.history_horizon);

        TrackState state;
        state.source = pt.source;
        state.lateral_est = pt.lateral;
        state.cls = pt.cls ? pt.cls : track.last_cls;
        state.lateral_rate_est = lsq_slope(track.lat_samples).value_or(0.0);

        if (pt.measured_gap) {
            track.coasting = false;
            track.gap_samples.emplace_back(t, *pt.measured_gap);
            trim(track.gap_samples, t, cfg_.history_horizon);
            state.gap_est = *pt.measured_gap;
            if (pt.rel_v) {
                state.rel_v_est = *pt.rel_v;
                state.rel_v_valid = true;
            } else if (auto slope = lsq_slope(track.gap_samples)) {
                state.rel_v_est = *slope;
                state.rel_v_valid = true;
            }
            track.coast_gap = state.gap_est;
            track.coast_rate = state.rel_v_valid ? state.rel_v_est : 0.0;
            track.coast_from = t;
        } else {
            // Detection without a usable position: dead-reckon from the last
            // measured state. Never report a negative dead-reckoned gap.
            if (!track.coasting) track.coasting = true;
            state.coasted = true;
            state.gap_est =
                std::max(0.0, track.coast_gap + track.coast_rate * (t - track.coast_from));
            if (pt.rel_v) {
                state.rel_v_est = *pt.rel_v;
                state.rel_v_valid = true;
            } else if (track.coast_rate != 0.0 || !track.gap_samples.empty()) {
                state.rel_v_est = track.coast_rate;
                state.rel_v_valid = true;
            }
        }
        out.push_back(state);
    }
    return out;
}

} // namespace hazopwb
