// Command-line workbench: validation, deviation enumeration, coverage,
// closed-loop fault-injection simulation and campaign orchestration for
// perception HAZOP analyses.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "hazopwb/coverage.hpp"
#include "hazopwb/json_io.hpp"
#include "hazopwb/report.hpp"
#include "hazopwb/simulator.hpp"

namespace hz = hazopwb;
using nlohmann::json;

namespace {

// 0 success, 1 validation violations, 2 coverage gaps, 3 campaign
// discrepancies, 4 input/parse error; highest applicable wins.
enum ExitStatus : int {
    kOk = 0,
    kValidation = 1,
    kCoverage = 2,
    kCampaign = 3,
    kInput = 4,
};

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string format = "text";
};

hz::SimConfig resolve_config(const GlobalOptions& opts) {
    if (opts.config_path.empty()) return hz::SimConfig{};
    return hz::load_config(opts.config_path);
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw hz::ParseError("cannot open output path '" + out_path + "'");
    out << content;
}

std::vector<std::string> split_csv_arg(const std::string& arg) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : arg) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

int cmd_validate(const std::vector<std::string>& paths, const std::string& rules_arg,
                 const GlobalOptions& opts) {
    const hz::RuleSet rules = hz::RuleSet::parse(split_csv_arg(rules_arg));

    // First pass: load everything so a worksheet can lint against the model.
    std::optional<hz::SystemModel> model;
    std::optional<hz::ScenarioDoc> scenario;
    struct Loaded {
        std::string path;
        std::string kind;
        json doc;
    };
    std::vector<Loaded> files;
    for (const auto& path : paths) {
        json doc = hz::load_json_file(path);
        const std::string kind = hz::document_kind(doc);
        if (kind.empty()) throw hz::ParseError(path + ": unrecognized document type");
        if (kind == "model") model = hz::model_from_json(doc, path);
        if (kind == "scenario") scenario = hz::scenario_from_json(doc, path);
        files.push_back({path, kind, std::move(doc)});
    }

    bool any_violation = false;
    json json_out = json::object();
    std::string text_out;
    for (const auto& file : files) {
        hz::ValidationReport report;
        if (file.kind == "model") {
            report = hz::validate_model(hz::model_from_json(file.doc, file.path));
        } else if (file.kind == "usecases") {
            report = hz::validate_usecases(hz::usecases_from_json(file.doc, file.path));
        } else if (file.kind == "worksheet") {
            if (!model)
                throw hz::ParseError(file.path +
                                     ": worksheet lint needs a model document in the same "
                                     "invocation");
            report = hz::lint_worksheet(hz::worksheet_from_json(file.doc, file.path), *model,
                                        rules);
        } else if (file.kind == "scenario") {
            hz::ScenarioDoc doc = hz::scenario_from_json(file.doc, file.path);
            try {
                hz::validate_scenario(doc.scenario);
            } catch (const std::invalid_argument& e) {
                report.add("invalid-scenario", doc.scenario.id, e.what());
            }
        } else if (file.kind == "injections") {
            if (!scenario)
                throw hz::ParseError(file.path +
                                     ": injection validation needs a scenario document in the "
                                     "same invocation");
            try {
                hz::validate_injections(hz::injections_from_json(file.doc, file.path),
                                        scenario->channels, scenario->scenario);
            } catch (const std::invalid_argument& e) {
                report.add("invalid-injection", file.path, e.what());
            }
        } else if (file.kind == "campaign") {
            (void)hz::campaign_from_json(file.doc, file.path); // parse is the check
        }
        any_violation = any_violation || !report.ok();
        json_out[file.path] = hz::validation_report_to_json(report);
        text_out += hz::render_validation_text(report, file.path);
    }

    write_output("", opts.format == "json" ? json_out.dump(2) + "\n" : text_out);
    return any_violation ? kValidation : kOk;
}

int cmd_enumerate(const std::string& model_path, const std::string& modes_arg,
                  const std::string& caps_arg, const std::string& out_path,
                  const GlobalOptions& opts) {
    const hz::SystemModel model = hz::load_model(model_path);
    const hz::ValidationReport report = hz::validate_model(model);
    if (!report.ok()) {
        std::cerr << hz::render_validation_text(report, model_path);
        return kValidation;
    }
    std::optional<std::vector<std::string>> modes;
    if (!modes_arg.empty()) modes = split_csv_arg(modes_arg);
    std::optional<std::vector<std::string>> caps;
    if (!caps_arg.empty()) caps = split_csv_arg(caps_arg);
    const auto cells = hz::enumerate_cells(model, caps, modes);

    // Stub worksheet: one analysed-pending row per cell, template text only.
    hz::Worksheet ws;
    for (const auto& cell : cells) {
        hz::HazopEntry entry;
        entry.function_id = cell.function_id;
        entry.parameter_id = cell.parameter_id;
        entry.guideword = cell.guideword;
        entry.mode = cell.mode;
        entry.row_id = cell.parameter_id + "/" + std::string(hz::guideword_label(cell.guideword));
        if (cell.mode) entry.row_id += "@" + *cell.mode;
        const hz::Parameter* param = model.find_parameter(cell.parameter_id);
        entry.deviation = std::string(hz::guideword_label(cell.guideword)) + " applied to " +
                          (param ? param->name : cell.parameter_id) + " (pending analysis)";
        entry.situation = "";
        entry.disposition = hz::Disposition::Analysed;
        ws.entries.push_back(std::move(entry));
    }
    write_output(out_path, hz::worksheet_to_json(ws).dump(2) + "\n");
    (void)opts;
    return kOk;
}

int cmd_coverage(const std::string& model_path, const std::vector<std::string>& worksheet_paths,
                 const std::string& modes_arg, const std::string& caps_arg,
                 double fail_under, const GlobalOptions& opts) {
    const hz::SystemModel model = hz::load_model(model_path);
    std::vector<hz::HazopEntry> entries;
    for (const auto& path : worksheet_paths) {
        const hz::Worksheet ws = hz::load_worksheet(path);
        entries.insert(entries.end(), ws.entries.begin(), ws.entries.end());
    }
    std::optional<std::vector<std::string>> modes;
    if (!modes_arg.empty()) modes = split_csv_arg(modes_arg);
    std::optional<std::vector<std::string>> caps;
    if (!caps_arg.empty()) caps = split_csv_arg(caps_arg);
    const auto cells = hz::enumerate_cells(model, caps, modes);
    const hz::CoverageReport report = hz::check_coverage(cells, entries);

    write_output("", opts.format == "json"
                         ? hz::coverage_report_to_json(report).dump(2) + "\n"
                         : hz::render_coverage_text(report));
    if (fail_under >= 0.0 && report.covered_fraction < fail_under) return kCoverage;
    return kOk;
}

int cmd_simulate(const std::string& scenario_path, const std::string& injection_path,
                 bool monitor, bool tracker_discard, const std::string& trace_path,
                 const GlobalOptions& opts) {
    hz::RunInputs inputs;
    hz::ScenarioDoc doc = hz::load_scenario(scenario_path);
    inputs.scenario = doc.scenario;
    inputs.channels = doc.channels;
    if (!injection_path.empty()) inputs.injections = hz::load_injections(injection_path);
    inputs.tracker.discard_history_on_reclass = tracker_discard;
    inputs.monitor_enabled = monitor;
    inputs.config = resolve_config(opts);
    if (opts.seed) inputs.scenario.seed = *opts.seed;
    inputs.trace_path = trace_path;
    inputs.outcome_id = doc.scenario.id;

    const hz::SimOutcome outcome = hz::run_scenario(inputs);
    write_output("", opts.format == "json" ? hz::outcome_to_json(outcome).dump(2) + "\n"
                                           : hz::render_outcome_text(outcome));
    return kOk;
}

int cmd_campaign(const std::string& spec_path, const std::string& out_dir, int jobs,
                 const GlobalOptions& opts) {
    const hz::CampaignSpec spec = hz::load_campaign(spec_path);
    auto resolve = [&](const std::string& ref) {
        std::filesystem::path p(ref);
        return p.is_absolute() ? p : spec.base_dir / p;
    };

    hz::CampaignInputs inputs;
    inputs.model = hz::load_model(resolve(spec.model_ref));
    const hz::ValidationReport model_report = hz::validate_model(inputs.model);
    if (!model_report.ok()) {
        std::cerr << hz::render_validation_text(model_report, spec.model_ref);
        return kValidation;
    }
    inputs.worksheet = hz::load_worksheet(resolve(spec.worksheet_ref));
    const hz::ValidationReport ws_report =
        hz::lint_worksheet(inputs.worksheet, inputs.model, hz::RuleSet{});
    if (!ws_report.ok()) {
        std::cerr << hz::render_validation_text(ws_report, spec.worksheet_ref);
        return kValidation;
    }
    for (const auto& ref : spec.scenario_refs) {
        inputs.scenarios.push_back(hz::load_scenario(resolve(ref)));
    }
    inputs.spec = spec;
    inputs.config = resolve_config(opts);
    inputs.out_dir = out_dir;
    inputs.jobs = jobs;

    const hz::OutcomeMatrix matrix = hz::run_campaign(inputs);
    const hz::DiscrepancyReport discrepancies = hz::evidence_check(matrix, inputs.worksheet);

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_output(out_dir + "/matrix.json", hz::matrix_to_json(matrix).dump(2) + "\n");
        write_output(out_dir + "/summary.csv", hz::matrix_summary_csv(matrix));
        write_output(out_dir + "/discrepancies.json",
                     hz::discrepancy_report_to_json(discrepancies).dump(2) + "\n");
    }
    if (opts.format == "json") {
        json out;
        out["matrix"] = hz::matrix_to_json(matrix);
        out["discrepancies"] = hz::discrepancy_report_to_json(discrepancies);
        write_output("", out.dump(2) + "\n");
    } else {
        write_output("", hz::matrix_summary_csv(matrix) + hz::render_discrepancy_text(discrepancies));
    }
    return discrepancies.items.empty() ? kOk : kCampaign;
}

int cmd_report(const std::string& worksheet_path, const std::string& usecases_path,
               const std::string& out_path, const GlobalOptions& opts) {
    const hz::Worksheet ws = hz::load_worksheet(worksheet_path);
    std::vector<hz::UseCase> usecases;
    if (!usecases_path.empty()) usecases = hz::load_usecases(usecases_path);
    std::string content;
    if (opts.format == "csv") {
        content = hz::render_worksheet_csv(ws);
    } else if (opts.format == "json") {
        content = hz::worksheet_to_json(ws).dump(2) + "\n";
    } else {
        content = hz::render_worksheet_markdown(ws, usecases);
    }
    write_output(out_path, content);
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Perception HAZOP workbench"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--config", global.config_path, "Limits and controller defaults (JSON)");
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "Scenario seed override");

    std::vector<std::string> validate_paths;
    std::string rules_arg;
    auto* validate = app.add_subcommand("validate", "Validate models, use cases, worksheets");
    validate->add_option("paths", validate_paths, "Documents to validate")->required();
    validate->add_option("--rules", rules_arg, "Optional lint rules, comma-separated");
    validate->add_option("--format", global.format, "text|json");

    std::string enum_model, enum_modes, enum_caps, enum_out;
    auto* enumerate = app.add_subcommand("enumerate", "Emit a stub worksheet covering all cells");
    enumerate->add_option("model", enum_model, "System model")->required();
    enumerate->add_option("--modes", enum_modes, "Operational modes, comma-separated");
    enumerate->add_option("--capabilities", enum_caps, "Capability filter, comma-separated");
    enumerate->add_option("--out", enum_out, "Output path (default stdout)");

    std::string cov_model, cov_modes, cov_caps;
    std::vector<std::string> cov_ws;
    double fail_under = -1.0;
    auto* coverage = app.add_subcommand("coverage", "Check worksheet coverage of the cell space");
    coverage->add_option("model", cov_model, "System model")->required();
    coverage->add_option("worksheets", cov_ws, "Worksheet(s); entries are combined")->required();
    coverage->add_option("--modes", cov_modes, "Operational modes, comma-separated");
    coverage->add_option("--capabilities", cov_caps, "Capability filter, comma-separated");
    coverage->add_option("--fail-under", fail_under, "Exit 2 when covered fraction is lower");
    coverage->add_option("--format", global.format, "text|json");

    std::string sim_scenario, sim_injection, sim_trace;
    bool sim_monitor = false, sim_discard = false;
    auto* simulate = app.add_subcommand("simulate", "Run one closed-loop scenario");
    simulate->add_option("scenario", sim_scenario, "Scenario document")->required();
    simulate->add_option("injection", sim_injection, "Injection document (optional)");
    simulate->add_flag("--monitor", sim_monitor, "Enable the plausibility monitor");
    simulate->add_flag("--tracker-discard", sim_discard,
                       "Discard track history on reclassification");
    simulate->add_option("--trace", sim_trace, "Write the step trace CSV here");
    simulate->add_option("--format", global.format, "text|json");

    std::string camp_spec, camp_out;
    int camp_jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (camp_jobs <= 0) camp_jobs = 1;
    auto* campaign = app.add_subcommand("campaign", "Run a deviation-injection campaign");
    campaign->add_option("spec", camp_spec, "Campaign spec")->required();
    campaign->add_option("--out", camp_out, "Output directory for matrix, summary and traces");
    campaign->add_option("--jobs", camp_jobs, "Parallel runs (default: processors)");
    campaign->add_option("--format", global.format, "text|json");

    std::string rep_ws, rep_ucs, rep_out;
    auto* report = app.add_subcommand("report", "Render worksheets and use-case sheets");
    report->add_option("worksheet", rep_ws, "Worksheet")->required();
    report->add_option("--usecases", rep_ucs, "Use-case document");
    report->add_option("--format", global.format, "md|csv|json");
    report->add_option("--out", rep_out, "Output path (default stdout)");

    CLI11_PARSE(app, argc, argv);
    if (seed_opt->count() > 0) global.seed = seed_value;

    try {
        if (validate->parsed()) return cmd_validate(validate_paths, rules_arg, global);
        if (enumerate->parsed())
            return cmd_enumerate(enum_model, enum_modes, enum_caps, enum_out, global);
        if (coverage->parsed())
            return cmd_coverage(cov_model, cov_ws, cov_modes, cov_caps, fail_under, global);
        if (simulate->parsed())
            return cmd_simulate(sim_scenario, sim_injection, sim_monitor, sim_discard,
                                sim_trace, global);
        if (campaign->parsed()) return cmd_campaign(camp_spec, camp_out, camp_jobs, global);
        if (report->parsed()) return cmd_report(rep_ws, rep_ucs, rep_out, global);
    } catch (const hz::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    }
    return kOk;
}
