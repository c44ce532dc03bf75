#include "hazopwb/scenario.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace hazopwb {

std::map<Quantity, Interval> default_monitor_ranges() {
    return {
        {Quantity::TargetRange, {0.0, 250.0}},
        {Quantity::TargetRelativeVelocity, {-70.0, 70.0}},
        {Quantity::LaneLateralOffset, {-8.0, 8.0}},
        {Quantity::LaneCurvature, {-0.1, 0.1}},
    };
}

void validate_scenario(const Scenario& sc, double vehicle_width) {
    if (sc.dt <= 0.0) throw std::invalid_argument("scenario: dt must be positive");
    if (sc.duration < sc.dt) throw std::invalid_argument("scenario: duration must be >= dt");
    if (sc.road.empty()) throw std::invalid_argument("scenario: road needs at least one segment");
    for (const auto& seg : sc.road) {
        if (seg.length <= 0.0) throw std::invalid_argument("scenario: segment length must be positive");
        if (!std::isfinite(seg.curvature))
            throw std::invalid_argument("scenario: segment curvature must be finite");
        if (seg.lane_width <= vehicle_width)
            throw std::invalid_argument("scenario: lane width must exceed vehicle width");
    }
    if (sc.ego_init.v < 0.0) throw std::invalid_argument("scenario: ego speed must be nonnegative");
}

namespace {

bool guideword_applies(Guideword g, Quantity q) {
    const bool scalar = q == Quantity::LaneLateralOffset || q == Quantity::LaneCurvature ||
                        q == Quantity::TargetRange || q == Quantity::TargetRelativeVelocity;
    const bool target_scalar = q == Quantity::TargetRange || q == Quantity::TargetRelativeVelocity;
    switch (g) {
    case Guideword::NoOrNot: return true;
    case Guideword::More:
    case Guideword::Less: return scalar || q == Quantity::TargetPresent;
    case Guideword::AsWellAs: return q == Quantity::TargetPresent;
    case Guideword::PartOf:
        return target_scalar || q == Quantity::TargetPresent || q == Quantity::TargetClass;
    case Guideword::OtherThanInstead: return q == Quantity::TargetClass;
    case Guideword::Reverse: return scalar;
    case Guideword::Early: return scalar || q == Quantity::TargetPresent;
    case Guideword::Late:
        return scalar || q == Quantity::TargetPresent || q == Quantity::TargetClass;
    case Guideword::Intermittent:
        return scalar || q == Quantity::TargetPresent || q == Quantity::TargetClass;
    }
    return false;
}

} // namespace

void validate_injections(const std::vector<InjectionSpec>& injections,
                         const std::vector<SensorChannel>& channels, const Scenario& sc) {
    std::map<std::string, const SensorChannel*> by_id;
    for (const auto& ch : channels) by_id.emplace(ch.id, &ch);

    for (const auto& inj : injections) {
        auto it = by_id.find(inj.channel_id);
        if (it == by_id.end())
            throw std::invalid_argument("injection references unknown channel '" +
                                        inj.channel_id + "'");
        const SensorChannel& ch = *it->second;
        if (inj.t_start < 0.0 || inj.t_start > sc.duration ||
            inj.t_end.value_or(sc.duration) > sc.duration ||
            inj.t_end.value_or(sc.duration) < inj.t_start)
            throw std::invalid_argument("injection window must lie within [0, duration]");
        if (!guideword_applies(inj.guideword, ch.quantity))
            throw std::invalid_argument(std::string("guideword '") +
                                        std::string(guideword_label(inj.guideword)) +
                                        "' is not applicable to channel quantity '" +
                                        std::string(to_string(ch.quantity)) + "'");
        if (inj.guideword == Guideword::AsWellAs && !inj.spurious_target)
            throw std::invalid_argument("As well as injection needs a spurious_target");
        if (inj.guideword == Guideword::Late && inj.magnitude.delay <= 0.0)
            throw std::invalid_argument("Late injection needs a positive delay");
        if (inj.guideword == Guideword::Early && inj.magnitude.shift <= 0.0)
            throw std::invalid_argument("Early injection needs a positive shift");
        if (inj.guideword == Guideword::Intermittent &&
            (inj.magnitude.period <= 0.0 || inj.magnitude.duty <= 0.0 ||
             inj.magnitude.duty >= 1.0))
            throw std::invalid_argument("Intermittent injection needs period > 0 and duty in (0,1)");
        if ((inj.guideword == Guideword::More || inj.guideword == Guideword::Less) &&
            ch.quantity == Quantity::TargetPresent && inj.magnitude.count <= 0)
            throw std::invalid_argument("More/Less on detections needs a positive count");
    }
}

std::string_view to_string(Quantity q) {
    switch (q) {
    case Quantity::LaneLateralOffset: return "lane_lateral_offset";
    case Quantity::LaneCurvature: return "lane_curvature";
    case Quantity::TargetRange: return "target_range";
    case Quantity::TargetRelativeVelocity: return "target_relative_velocity";
    case Quantity::TargetClass: return "target_class";
    case Quantity::TargetPresent: return "target_present";
    }
    return "?";
}

std::string_view to_string(TargetClass c) {
    switch (c) {
    case TargetClass::Vehicle: return "vehicle";
    case TargetClass::Pedestrian: return "pedestrian";
    case TargetClass::Static: return "static";
    }
    return "?";
}

std::string_view to_string(Classification c) {
    switch (c) {
    case Classification::Success: return "success";
    case Classification::LaneDeparture: return "lane_departure";
    case Classification::Collision: return "collision";
    case Classification::LateralLimitViolation: return "lateral_limit_violation";
    case Classification::MissedWarning: return "missed_warning";
    case Classification::SpuriousResponse: return "spurious_response";
    }
    return "?";
}

std::optional<Quantity> parse_quantity(std::string_view s) {
    if (s == "lane_lateral_offset") return Quantity::LaneLateralOffset;
    if (s == "lane_curvature") return Quantity::LaneCurvature;
    if (s == "target_range") return Quantity::TargetRange;
    if (s == "target_relative_velocity") return Quantity::TargetRelativeVelocity;
    if (s == "target_class") return Quantity::TargetClass;
    if (s == "target_present") return Quantity::TargetPresent;
    return std::nullopt;
}

std::optional<TargetClass> parse_target_class(std::string_view s) {
    if (s == "vehicle") return TargetClass::Vehicle;
    if (s == "pedestrian") return TargetClass::Pedestrian;
    if (s == "static") return TargetClass::Static;
    return std::nullopt;
}

std::optional<Classification> parse_classification(std::string_view s) {
    if (s == "success") return Classification::Success;
    if (s == "lane_departure") return Classification::LaneDeparture;
    if (s == "collision") return Classification::Collision;
    if (s == "lateral_limit_violation") return Classification::LateralLimitViolation;
    if (s == "missed_warning") return Classification::MissedWarning;
    if (s == "spurious_response") return Classification::SpuriousResponse;
    return std::nullopt;
}

int classification_severity(Classification c) {
    switch (c) {
    case Classification::Collision: return 5;
    case Classification::LaneDeparture: return 4;
    case Classification::LateralLimitViolation: return 3;
    case Classification::SpuriousResponse: return 2;
    case Classification::MissedWarning: return 1;
    case Classification::Success: return 0;
    }
    return 0;
}

} // namespace hazopwb
