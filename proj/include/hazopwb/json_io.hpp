#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hazopwb/campaign.hpp"
#include "hazopwb/coverage.hpp"
#include "hazopwb/model.hpp"
#include "hazopwb/scenario.hpp"
#include "hazopwb/worksheet.hpp"

namespace hazopwb {

// Raised for malformed documents; message carries file and JSON-path context.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All documents are UTF-8 JSON with top-level {"schema_version": "1", ...}.
// Parsing is strict: unknown keys, wrong types and out-of-enum values are
// rejected with the offending path.

SystemModel model_from_json(const nlohmann::json& doc, const std::string& context);
std::vector<UseCase> usecases_from_json(const nlohmann::json& doc, const std::string& context);
Worksheet worksheet_from_json(const nlohmann::json& doc, const std::string& context);
ScenarioDoc scenario_from_json(const nlohmann::json& doc, const std::string& context);
std::vector<InjectionSpec> injections_from_json(const nlohmann::json& doc,
                                                const std::string& context);
CampaignSpec campaign_from_json(const nlohmann::json& doc, const std::string& context);
SimConfig config_from_json(const nlohmann::json& doc, const std::string& context);

SystemModel load_model(const std::filesystem::path& path);
std::vector<UseCase> load_usecases(const std::filesystem::path& path);
Worksheet load_worksheet(const std::filesystem::path& path);
ScenarioDoc load_scenario(const std::filesystem::path& path);
std::vector<InjectionSpec> load_injections(const std::filesystem::path& path);
CampaignSpec load_campaign(const std::filesystem::path& path);
SimConfig load_config(const std::filesystem::path& path);

nlohmann::json worksheet_to_json(const Worksheet& ws);
nlohmann::json validation_report_to_json(const ValidationReport& report);
nlohmann::json coverage_report_to_json(const CoverageReport& report);
nlohmann::json outcome_to_json(const SimOutcome& outcome);
nlohmann::json matrix_to_json(const OutcomeMatrix& matrix);
nlohmann::json discrepancy_report_to_json(const DiscrepancyReport& report);

// Inverses used by the JSON round-trip guarantees.
ValidationReport validation_report_from_json(const nlohmann::json& j);
CoverageReport coverage_report_from_json(const nlohmann::json& j);
SimOutcome outcome_from_json(const nlohmann::json& j);

// Kind of a document, sniffed from its payload key ("model", "usecases",
// "worksheet", "scenario", "injections", "campaign").
std::string document_kind(const nlohmann::json& doc);

nlohmann::json load_json_file(const std::filesystem::path& path);

} // namespace hazopwb
