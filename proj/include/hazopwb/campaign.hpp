#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hazopwb/model.hpp"
#include "hazopwb/scenario.hpp"
#include "hazopwb/worksheet.hpp"

namespace hazopwb {

// A scenario document: the scenario itself plus the sensor suite it runs
// with (channels are part of the simulated system configuration).
struct ScenarioDoc {
    Scenario scenario;
    std::vector<SensorChannel> channels;
};

// One magnitude-grid entry: fault parameters plus an optional window.
// `canon` is the canonical serialized form used for content-derived seeds.
struct MagnitudeVariant {
    MagnitudeBlock block;
    std::optional<double> t_start;
    std::optional<double> t_end;
    std::optional<Target> spurious_target;
    std::string canon;
};

struct CampaignSpec {
    std::filesystem::path base_dir; // refs resolve relative to the spec file
    std::string model_ref;
    std::string worksheet_ref;
    std::vector<std::string> scenario_refs;
    std::map<Guideword, std::vector<MagnitudeVariant>> magnitude_grid;
    bool monitor_enabled = false;
    std::vector<TrackerConfig> tracker_variants; // empty means one default variant
    std::map<std::string, std::string> binding_overrides; // parameter_id -> channel_id
};

struct BindingReport {
    std::map<std::string, std::string> bound; // parameter_id -> channel_id
    std::vector<std::string> unbound;         // parameters with no matching channel
};

// Binds by declared quantity match; parameters without a declared quantity
// are reported unbound, never guessed. Two channels carrying the same
// quantity make the binding ambiguous: error naming both, unless an explicit
// override picks one.
BindingReport bind_parameters(const SystemModel& model,
                              const std::vector<SensorChannel>& channels,
                              const std::map<std::string, std::string>& overrides = {});

struct RunRecord {
    std::string run_key; // "<row>|<scenario>|m<k>|v<k>"
    std::string row_id;
    std::string scenario_id;
    std::size_t magnitude_index = 0;
    std::size_t variant_index = 0;
    std::uint64_t seed = 0;
    SimOutcome outcome;
};

struct RowSummary {
    std::vector<std::string> outcome_ids;
    Classification worst = Classification::Success;
    bool evidenced = false; // hazard claimed and at least one non-success run
    int n_runs = 0;
    int n_failures = 0;
};

struct OutcomeMatrix {
    std::map<std::string, RowSummary> rows; // keyed by row_id; only rows that ran
    std::vector<std::string> unsimulated;   // analysed rows with no binding anywhere
    std::vector<RunRecord> runs;            // canonical order
};

struct DiscrepancyReport {
    struct Item {
        std::string row_id;
        std::string kind; // "unevidenced-hazard" | "unclaimed-hazard"
        bool operator==(const Item&) const = default;
    };
    std::vector<Item> items;
};

struct CampaignInputs {
    SystemModel model;
    Worksheet worksheet;
    std::vector<ScenarioDoc> scenarios;
    CampaignSpec spec;
    SimConfig config;
    std::string out_dir; // traces land in <out_dir>/traces; empty disables files
    int jobs = 1;
};

// One run per (bound analysed row x scenario x magnitude variant x tracker
// variant). Seeds are content-derived, so the outcome set is invariant under
// scenario list reordering. Throws std::invalid_argument when a run's
// injection fails validation, naming the offending tuple.
OutcomeMatrix run_campaign(const CampaignInputs& inputs);

// Soft report; never mutates the worksheet.
DiscrepancyReport evidence_check(const OutcomeMatrix& matrix, const Worksheet& worksheet);

std::string sanitize_run_key(const std::string& key);

} // namespace hazopwb
