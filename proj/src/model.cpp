#include "hazopwb/model.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>

namespace hazopwb {

namespace {

bool evidence_bool(const std::map<std::string, std::string>& ev, const std::string& key,
                   bool fallback) {
    auto it = ev.find(key);
    if (it == ev.end()) return fallback;
    return it->second == "true" || it->second == "1" || it->second == "yes";
}

bool evidence_has(const std::map<std::string, std::string>& ev, const std::string& key) {
    return ev.find(key) != ev.end();
}

} // namespace

const Capability* SystemModel::find_capability(const std::string& cid) const {
    for (const auto& svc : services)
        for (const auto& cap : svc.capabilities)
            if (cap.id == cid) return &cap;
    return nullptr;
}

const Function* SystemModel::find_function(const std::string& fid) const {
    for (const auto& svc : services)
        for (const auto& cap : svc.capabilities)
            for (const auto& fn : cap.functions)
                if (fn.id == fid) return &fn;
    return nullptr;
}

const Parameter* SystemModel::find_parameter(const std::string& pid) const {
    for (const auto& svc : services)
        for (const auto& cap : svc.capabilities)
            for (const auto& fn : cap.functions)
                for (const auto& p : fn.parameters)
                    if (p.id == pid) return &p;
    return nullptr;
}

const Service* SystemModel::find_service(const std::string& sid) const {
    for (const auto& svc : services)
        if (svc.id == sid) return &svc;
    return nullptr;
}

std::vector<const Function*> SystemModel::functions_of(const Capability& cap) const {
    std::vector<const Function*> out;
    std::set<std::string> seen;
    for (const auto& fn : cap.functions) {
        if (seen.insert(fn.id).second) out.push_back(&fn);
    }
    for (const auto& ref : cap.function_refs) {
        const Function* fn = find_function(ref);
        if (fn && seen.insert(fn->id).second) out.push_back(fn);
    }
    return out;
}

std::vector<const Capability*> SystemModel::all_capabilities() const {
    std::vector<const Capability*> out;
    std::set<std::string> seen;
    for (const auto& svc : services)
        for (const auto& cap : svc.capabilities)
            if (seen.insert(cap.id).second) out.push_back(&cap);
    return out;
}

namespace {

// Braking collapses onto acceleration for the level rules; warnings are not
// automated control of motion.
void check_service_controls(const SystemModel& model, const Service& svc,
                            ValidationReport& report) {
    bool steering = false;
    bool accel = false;
    auto scan = [&](const Capability& cap) {
        for (Control c : cap.controls) {
            if (c == Control::Steering) steering = true;
            if (c == Control::Acceleration || c == Control::Braking) accel = true;
        }
    };
    for (const auto& cap : svc.capabilities) scan(cap);
    for (const auto& ref : svc.capability_refs) {
        if (const Capability* cap = model.find_capability(ref)) scan(*cap);
    }
    if (svc.level == 1 && steering && accel) {
        report.add("L1-dual-control", svc.id,
                   "level-1 service controls both steering and acceleration");
    }
    if (svc.level == 0 && (steering || accel)) {
        report.add("L0-control", svc.id,
                   "level-0 service declares automated motion control");
    }
}

void check_sub_service_cycles(const SystemModel& model, ValidationReport& report) {
    // Colors: 0 unvisited, 1 on stack, 2 done.
    std::map<std::string, int> color;
    std::vector<std::string> stack;

    std::function<void(const Service&)> visit = [&](const Service& svc) {
        color[svc.id] = 1;
        for (const auto& sub : svc.sub_services) {
            const Service* child = model.find_service(sub);
            if (!child) continue; // dangling reference reported elsewhere
            auto c = color.find(child->id);
            if (c != color.end() && c->second == 1) {
                report.add("reference-cycle", svc.id,
                           "sub-service chain returns to '" + child->id + "'");
                continue;
            }
            if (c == color.end() || c->second == 0) visit(*child);
        }
        color[svc.id] = 2;
    };
    for (const auto& svc : model.services) {
        if (color[svc.id] == 0) visit(svc);
    }
}

} // namespace

ValidationReport validate_model(const SystemModel& model) {
    ValidationReport report;

    // Declaration census: every id must be declared exactly once.
    std::map<std::string, int> decl_count;
    auto declare = [&](const std::string& id) { decl_count[id] += 1; };
    declare(model.id);
    for (const auto& svc : model.services) {
        declare(svc.id);
        for (const auto& cap : svc.capabilities) {
            declare(cap.id);
            for (const auto& fn : cap.functions) {
                declare(fn.id);
                for (const auto& p : fn.parameters) declare(p.id);
            }
        }
    }
    for (const auto& impl : model.implementations) declare(impl.id);
    for (const auto& ds : model.data_sources) declare(ds.id);

    for (const auto& [id, n] : decl_count) {
        if (n > 1) report.add("duplicate-id", id, "declared " + std::to_string(n) + " times");
    }

    auto require = [&](const std::string& id, const char* kind, const std::string& owner) {
        if (decl_count.find(id) == decl_count.end()) {
            report.add("dangling-reference", owner,
                       std::string("references unknown ") + kind + " '" + id + "'");
        }
    };

    // Reference resolution + per-type rules.
    std::map<std::string, int> capability_referrers;
    std::map<std::string, int> function_referrers;
    for (const auto& svc : model.services) {
        if (svc.level < 0 || svc.level > 5) {
            report.add("invalid-level", svc.id, "autonomy level outside 0-5");
        }
        for (const auto& sub : svc.sub_services) {
            require(sub, "service", svc.id);
            if (const Service* child = model.find_service(sub)) {
                if (child->level >= svc.level) {
                    report.add("sub-service-level", svc.id,
                               "sub-service '" + sub + "' has level >= parent");
                }
            }
        }
        for (const auto& ref : svc.capability_refs) {
            require(ref, "capability", svc.id);
            capability_referrers[ref] += 1;
        }
        check_service_controls(model, svc, report);

        for (const auto& cap : svc.capabilities) {
            if (cap.controls.empty()) {
                report.add("empty-controls", cap.id, "capability declares no controls");
            }
            for (const auto& ref : cap.function_refs) {
                require(ref, "function", cap.id);
                function_referrers[ref] += 1;
            }
            for (const auto& fn : cap.functions) {
                std::set<std::string> names;
                for (const auto& p : fn.parameters) {
                    if (!names.insert(p.name).second) {
                        report.add("duplicate-parameter-name", fn.id,
                                   "parameter name '" + p.name + "' repeats");
                    }
                    if (p.physical_range && p.physical_range->min > p.physical_range->max) {
                        report.add("invalid-range", p.id, "physical_range min exceeds max");
                    }
                    const bool needs_unit =
                        p.kind == ParameterKind::Scalar || p.kind == ParameterKind::Vector;
                    if (needs_unit && (p.unit.empty() || p.unit == "none")) {
                        report.add("missing-unit", p.id,
                                   "scalar/vector parameter must carry a unit");
                    }
                }
                for (const auto& impl : fn.implementations) {
                    require(impl, "implementation", fn.id);
                }
            }
        }
    }
    for (const auto& impl : model.implementations) {
        for (const auto& ds : impl.data_sources) require(ds, "data source", impl.id);
    }

    check_sub_service_cycles(model, report);

    // A capability or function used from more than one place is allowed;
    // it is surfaced as information so the analyst sees the sharing.
    for (const auto& [id, n] : capability_referrers) {
        if (n >= 1 && model.find_capability(id)) {
            report.note("shared-capability", id,
                        "capability referenced by " + std::to_string(n) + " service(s)");
        }
    }
    for (const auto& [id, n] : function_referrers) {
        if (n >= 1 && model.find_function(id)) {
            report.note("shared-function", id,
                        "function referenced by " + std::to_string(n) + " capability(ies)");
        }
    }

    return report;
}

std::string FailureLabel::path() const {
    return std::string(to_string(layer)) + "/" + category;
}

FailureLabel classify_failure(const FailureObservation& obs) {
    const auto& ev = obs.evidence;
    switch (obs.layer) {
    case FailureLayer::Sensing:
        if (!evidence_bool(ev, "output_present", true))
            return {obs.layer, "NonFunctional"};
        if (evidence_bool(ev, "degraded", false))
            return {obs.layer, "Degraded"};
        return {obs.layer, "Malfunctioning"};

    case FailureLayer::Perception:
        if (evidence_bool(ev, "sensor_failed", false) &&
            !evidence_bool(ev, "failure_recognised", false))
            return {obs.layer, "UnrecognisedSensorFailure"};
        if (evidence_has(ev, "object_exists") && !evidence_bool(ev, "object_exists", true))
            return {obs.layer, "Illusion"};
        if (!evidence_bool(ev, "detected", true))
            return {obs.layer, "NotDetected"};
        if (!evidence_bool(ev, "classified", true))
            return {obs.layer, "NotClassified"};
        if (evidence_has(ev, "class_correct") && !evidence_bool(ev, "class_correct", true))
            return {obs.layer, "Misclassification"};
        throw std::invalid_argument("classify_failure: perception evidence decides no category");

    case FailureLayer::Understanding: {
        if (evidence_has(ev, "perception_failure_recognised") &&
            !evidence_bool(ev, "perception_failure_recognised", true))
            return {obs.layer, "UnrecognisedPerceptionFailure"};
        auto it = ev.find("conflict_with");
        if (it != ev.end()) {
            const std::string& what = it->second;
            if (what == "sensors" || what == "sensor")
                return {obs.layer, "ConflictBetweenSensors"};
            if (what == "internal law" || what == "law")
                return {obs.layer, "ConflictWithInternalLaw"};
            if (what == "internal map" || what == "internal data" || what == "map")
                return {obs.layer, "ConflictWithInternalData"};
            throw std::invalid_argument("classify_failure: unknown conflict_with '" + what + "'");
        }
        throw std::invalid_argument(
            "classify_failure: understanding evidence decides no category");
    }

    case FailureLayer::Decision:
        return {obs.layer, "ConflictDecisionVsUnderstanding"};
    }
    throw std::invalid_argument("classify_failure: unknown layer");
}

std::string_view to_string(FailureLayer layer) {
    switch (layer) {
    case FailureLayer::Sensing: return "sensing";
    case FailureLayer::Perception: return "perception";
    case FailureLayer::Understanding: return "understanding";
    case FailureLayer::Decision: return "decision";
    }
    return "?";
}

std::string_view to_string(ParameterKind kind) {
    switch (kind) {
    case ParameterKind::Scalar: return "scalar";
    case ParameterKind::Vector: return "vector";
    case ParameterKind::DetectionSet: return "detection-set";
    case ParameterKind::Classification: return "classification";
    case ParameterKind::Event: return "event";
    }
    return "?";
}

std::string_view to_string(Modality modality) {
    switch (modality) {
    case Modality::Camera: return "camera";
    case Modality::Radar: return "radar";
    case Modality::Lidar: return "lidar";
    case Modality::Ultrasound: return "ultrasound";
    case Modality::Map: return "map";
    case Modality::Other: return "other";
    }
    return "?";
}

std::string_view to_string(Control control) {
    switch (control) {
    case Control::Steering: return "steering";
    case Control::Acceleration: return "acceleration";
    case Control::Braking: return "braking";
    case Control::Warning: return "warning";
    }
    return "?";
}

std::optional<FailureLayer> parse_failure_layer(std::string_view s) {
    if (s == "sensing") return FailureLayer::Sensing;
    if (s == "perception") return FailureLayer::Perception;
    if (s == "understanding") return FailureLayer::Understanding;
    if (s == "decision") return FailureLayer::Decision;
    return std::nullopt;
}

std::optional<ParameterKind> parse_parameter_kind(std::string_view s) {
    if (s == "scalar") return ParameterKind::Scalar;
    if (s == "vector") return ParameterKind::Vector;
    if (s == "detection-set") return ParameterKind::DetectionSet;
    if (s == "classification") return ParameterKind::Classification;
    if (s == "event") return ParameterKind::Event;
    return std::nullopt;
}

std::optional<Modality> parse_modality(std::string_view s) {
    if (s == "camera") return Modality::Camera;
    if (s == "radar") return Modality::Radar;
    if (s == "lidar") return Modality::Lidar;
    if (s == "ultrasound") return Modality::Ultrasound;
    if (s == "map") return Modality::Map;
    if (s == "other") return Modality::Other;
    return std::nullopt;
}

std::optional<Control> parse_control(std::string_view s) {
    if (s == "steering") return Control::Steering;
    if (s == "acceleration") return Control::Acceleration;
    if (s == "braking") return Control::Braking;
    if (s == "warning") return Control::Warning;
    return std::nullopt;
}

} // namespace hazopwb
