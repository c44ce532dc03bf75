#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hazopwb/guideword.hpp"
#include "hazopwb/validation.hpp"

namespace hazopwb {

// Five-level decomposition of a driver-assistance system:
// service -> capability -> function -> implementation -> data source.
// All types are immutable after construction; validation is a pure function.

enum class ParameterKind { Scalar, Vector, DetectionSet, Classification, Event };
enum class Modality { Camera, Radar, Lidar, Ultrasound, Map, Other };
enum class Control { Steering, Acceleration, Braking, Warning };

struct Interval {
    double min = 0.0;
    double max = 0.0;
};

struct Parameter {
    std::string id;
    std::string name;
    ParameterKind kind = ParameterKind::Scalar;
    std::string unit; // SI unit or "none"
    std::optional<Interval> physical_range;
    bool sign_meaningful = false;
    // Sensor quantity this parameter corresponds to, when simulatable
    // (one of the SensorChannel quantity tokens). Absent means the
    // parameter has no channel binding and campaigns report it unsimulated.
    std::optional<std::string> quantity;
};

struct Function {
    std::string id; // dotted-numeric row label, e.g. "ACC 1.1"
    std::string name;
    std::vector<Parameter> parameters;
    std::vector<std::string> implementations; // implementation ids
};

struct Capability {
    std::string id;
    std::string name; // e.g. ACC, ALC, AEB, FCW, LDW
    std::vector<Control> controls;
    std::vector<Function> functions;         // declared inline
    std::vector<std::string> function_refs;  // shared functions declared elsewhere
};

struct Service {
    std::string id;
    std::string name;
    int level = 0; // autonomy level 0-5
    std::vector<std::string> sub_services;
    std::vector<Capability> capabilities;          // declared inline
    std::vector<std::string> capability_refs;      // shared capabilities
};

struct Implementation {
    std::string id;
    std::string name;
    std::vector<std::string> data_sources;
};

struct DataSource {
    std::string id;
    std::string name;
    Modality modality = Modality::Other;
};

struct SystemModel {
    std::string id;
    std::vector<Service> services;
    std::vector<Implementation> implementations;
    std::vector<DataSource> data_sources;
    std::map<std::string, std::string> metadata; // may carry a declared SAE level tag

    // Lookup across inline declarations. Null when absent.
    const Capability* find_capability(const std::string& id) const;
    const Function* find_function(const std::string& id) const;
    const Parameter* find_parameter(const std::string& id) const;
    const Service* find_service(const std::string& id) const;

    // Unique function declarations reachable from a capability, in
    // declaration order (inline first, then refs).
    std::vector<const Function*> functions_of(const Capability& cap) const;
    std::vector<const Capability*> all_capabilities() const;
};

// Rules checked, each by stable name:
//   duplicate-id, dangling-reference, reference-cycle, sub-service-level,
//   L1-dual-control, L0-control, empty-controls, duplicate-parameter-name,
//   invalid-range, missing-unit.
// Informational: shared-capability, shared-function.
ValidationReport validate_model(const SystemModel& model);

// --- failure taxonomy ------------------------------------------------------

enum class FailureLayer { Sensing, Perception, Understanding, Decision };

enum class SensingFailure { NonFunctional, Degraded, Malfunctioning };
enum class PerceptionFailure {
    UnrecognisedSensorFailure,
    NotDetected,
    NotClassified,
    Misclassification,
    Illusion,
};
enum class UnderstandingFailure {
    UnrecognisedPerceptionFailure,
    ConflictBetweenSensors,
    ConflictWithInternalLaw,
    ConflictWithInternalData,
};
enum class DecisionFailure { ConflictDecisionVsUnderstanding };

// Evidence is a flat key-value record; booleans as "true"/"false".
// Keys consumed per layer:
//   sensing:       output_present, degraded
//   perception:    sensor_failed, failure_recognised, object_exists,
//                  detected, classified, class_correct
//   understanding: perception_failure_recognised, conflict_with
//                  ("sensors" | "internal law" | "internal map" | "internal data")
//   decision:      (none; single category)
struct FailureObservation {
    FailureLayer layer = FailureLayer::Sensing;
    std::map<std::string, std::string> evidence;
};

struct FailureLabel {
    FailureLayer layer;
    std::string category;   // enum member name, e.g. "NotClassified"
    std::string path() const; // "perception/NotClassified"
};

// Deterministic: first matching rule in a fixed decision list wins.
// Throws std::invalid_argument when the evidence decides no category.
FailureLabel classify_failure(const FailureObservation& obs);

std::string_view to_string(FailureLayer layer);
std::string_view to_string(ParameterKind kind);
std::string_view to_string(Modality modality);
std::string_view to_string(Control control);
std::optional<FailureLayer> parse_failure_layer(std::string_view s);
std::optional<ParameterKind> parse_parameter_kind(std::string_view s);
std::optional<Modality> parse_modality(std::string_view s);
std::optional<Control> parse_control(std::string_view s);

} // namespace hazopwb
