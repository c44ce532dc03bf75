#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "hazopwb/campaign.hpp"
#include "hazopwb/json_io.hpp"

using namespace hazopwb;

namespace {

const std::string kFixtures = HAZOPWB_FIXTURES;

CampaignInputs load_inputs(const std::string& campaign_name) {
    const CampaignSpec spec =
        load_campaign(kFixtures + "/campaigns/" + campaign_name + ".json");
    CampaignInputs inputs;
    inputs.model = load_model(spec.base_dir / spec.model_ref);
    inputs.worksheet = load_worksheet(spec.base_dir / spec.worksheet_ref);
    for (const auto& ref : spec.scenario_refs) {
        inputs.scenarios.push_back(load_scenario(spec.base_dir / ref));
    }
    inputs.spec = spec;
    return inputs;
}

int collisions(const OutcomeMatrix& matrix) {
    int n = 0;
    for (const auto& run : matrix.runs) {
        if (run.outcome.classification == Classification::Collision) ++n;
    }
    return n;
}

} // namespace

TEST_CASE("parameters bind by declared quantity") {
    const SystemModel model = load_model(kFixtures + "/model/alks.json");
    const ScenarioDoc doc = load_scenario(kFixtures + "/scenarios/acc_steady.json");
    const BindingReport binding = bind_parameters(model, doc.channels);

    CHECK(binding.bound.at("ACC 1.2.1") == "rdr_range");
    CHECK(binding.bound.at("ACC 1.1.1") == "rdr_relv");
    CHECK(binding.bound.at("ACC 1.1.2") == "rdr_present");
    // The warning event has no channel: reported, never guessed.
    CHECK(std::find(binding.unbound.begin(), binding.unbound.end(), "FCW 0.2.5") !=
          binding.unbound.end());
    // Lane parameters have no channel in the radar suite.
    CHECK(std::find(binding.unbound.begin(), binding.unbound.end(), "ALC 2.1.1") !=
          binding.unbound.end());
}

TEST_CASE("ambiguous bindings error naming both channels") {
    const SystemModel model = load_model(kFixtures + "/model/alks.json");
    ScenarioDoc doc = load_scenario(kFixtures + "/scenarios/acc_steady.json");
    SensorChannel second = doc.channels[1]; // rdr_range
    second.id = "rdr_range_b";
    doc.channels.push_back(second);
    try {
        bind_parameters(model, doc.channels);
        CHECK(false);
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        CHECK(what.find("rdr_range") != std::string::npos);
        CHECK(what.find("rdr_range_b") != std::string::npos);
    }
    // An explicit override resolves the ambiguity.
    const BindingReport binding =
        bind_parameters(model, doc.channels, {{"ACC 1.2.1", "rdr_range_b"}});
    CHECK(binding.bound.at("ACC 1.2.1") == "rdr_range_b");
}

TEST_CASE("reverse campaign: monitor off collides, monitor on does not") {
    CampaignInputs off = load_inputs("acc_reverse_monitor_off");
    const OutcomeMatrix matrix_off = run_campaign(off);
    CHECK(matrix_off.runs.size() == 1);
    CHECK(collisions(matrix_off) >= 1);
    CHECK(matrix_off.rows.at("ACC 1.2.1/Reverse").evidenced);

    CampaignInputs on = load_inputs("acc_reverse_monitor_on");
    const OutcomeMatrix matrix_on = run_campaign(on);
    CHECK(matrix_on.runs.size() == 1);
    CHECK(collisions(matrix_on) == 0);
    CHECK(matrix_on.runs[0].outcome.plausibility_flags > 0);
}

TEST_CASE("run count is rows x scenarios x grid x variants for bound rows") {
    CampaignInputs inputs = load_inputs("acc_reverse_monitor_off");
    // Second scenario with the same suite, different id.
    ScenarioDoc second = inputs.scenarios[0];
    second.scenario.id = "acc-steady-follow-b";
    second.scenario.ego_init.v = 22.0;
    inputs.scenarios.push_back(second);
    // Two magnitude variants, two tracker variants.
    MagnitudeVariant short_window;
    short_window.t_start = 1.0;
    short_window.t_end = 2.0;
    short_window.canon = "{\"window\":[1.0,2.0]}";
    inputs.spec.magnitude_grid[Guideword::Reverse].push_back(short_window);
    inputs.spec.tracker_variants.push_back(TrackerConfig{true, 2.0});

    const OutcomeMatrix matrix = run_campaign(inputs);
    CHECK(matrix.runs.size() == 1 * 2 * 2 * 2);
    CHECK(matrix.rows.at("ACC 1.2.1/Reverse").n_runs == 8);
}

TEST_CASE("outcome set is invariant under scenario list reordering") {
    CampaignInputs inputs = load_inputs("acc_reverse_monitor_off");
    ScenarioDoc second = inputs.scenarios[0];
    second.scenario.id = "acc-steady-follow-b";
    second.scenario.ego_init.v = 18.0;
    inputs.scenarios.push_back(second);

    const nlohmann::json forward = matrix_to_json(run_campaign(inputs));
    std::swap(inputs.scenarios[0], inputs.scenarios[1]);
    const nlohmann::json reversed = matrix_to_json(run_campaign(inputs));
    CHECK(forward == reversed);
}

TEST_CASE("parallel and serial campaigns produce identical matrices") {
    CampaignInputs inputs = load_inputs("default");
    inputs.jobs = 1;
    const nlohmann::json serial = matrix_to_json(run_campaign(inputs));
    inputs.jobs = 8;
    const nlohmann::json parallel = matrix_to_json(run_campaign(inputs));
    CHECK(serial == parallel);
}

TEST_CASE("rows without bindings are listed unsimulated, not run") {
    CampaignInputs inputs = load_inputs("acc_reverse_monitor_off");
    inputs.worksheet = load_worksheet(kFixtures + "/worksheets/fcw.json");
    const OutcomeMatrix matrix = run_campaign(inputs);
    CHECK(matrix.runs.empty());
    CHECK(matrix.rows.empty());
    // Analysed FCW rows appear under unsimulated; dispositions do not.
    CHECK(std::find(matrix.unsimulated.begin(), matrix.unsimulated.end(),
                    "FCW 0.2.5/No or Not") != matrix.unsimulated.end());
    CHECK(std::find(matrix.unsimulated.begin(), matrix.unsimulated.end(),
                    "FCW 0.2.5/Less") == matrix.unsimulated.end()); // same_as row
}

TEST_CASE("not_applicable and same_as rows never appear in the matrix") {
    CampaignInputs inputs = load_inputs("default");
    const OutcomeMatrix matrix = run_campaign(inputs);
    for (const auto& [row_id, summary] : matrix.rows) {
        (void)summary;
        CHECK(row_id.find("Part of") == std::string::npos);  // same_as rows
        CHECK(row_id.find("Other than") == std::string::npos); // not_applicable rows
    }
}

TEST_CASE("evidence check reports both directions of disagreement") {
    CampaignInputs inputs = load_inputs("default");
    const OutcomeMatrix matrix = run_campaign(inputs);
    const DiscrepancyReport report = evidence_check(matrix, inputs.worksheet);

    // The presence dropout row collides: hazard claimed, evidenced, no item.
    for (const auto& item : report.items) {
        CHECK(item.row_id != "ACC 1.1.2/No or Not");
    }
    // The steady scenario cannot evidence the relative-velocity sign flip.
    CHECK(std::any_of(report.items.begin(), report.items.end(),
                      [](const DiscrepancyReport::Item& i) {
                          return i.row_id == "ACC 1.1.1/Reverse" &&
                                 i.kind == "unevidenced-hazard";
                      }));

    // Force an unclaimed hazard: strip the hazard from a row that fails.
    Worksheet stripped = inputs.worksheet;
    for (auto& e : stripped.entries) {
        if (e.row_id == "ACC 1.2.1/Reverse") {
            e.hazard.reset();
            e.consequences.reset();
            e.causes.clear();
        }
    }
    const DiscrepancyReport flipped = evidence_check(matrix, stripped);
    CHECK(std::any_of(flipped.items.begin(), flipped.items.end(),
                      [](const DiscrepancyReport::Item& i) {
                          return i.row_id == "ACC 1.2.1/Reverse" &&
                                 i.kind == "unclaimed-hazard";
                      }));

    // Empty worksheet: empty report.
    CHECK(evidence_check(matrix, Worksheet{}).items.empty());
}

TEST_CASE("campaign aborts on an invalid run naming the tuple") {
    CampaignInputs inputs = load_inputs("acc_reverse_monitor_off");
    MagnitudeVariant bad;
    bad.t_start = 99.0; // outside every scenario
    bad.canon = "{\"window\":[99.0,null]}";
    inputs.spec.magnitude_grid[Guideword::Reverse] = {bad};
    try {
        run_campaign(inputs);
        CHECK(false);
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        CHECK(what.find("ACC 1.2.1/Reverse") != std::string::npos);
    }
}

TEST_CASE("matrix summary carries worst classification and failure counts") {
    CampaignInputs inputs = load_inputs("default");
    const OutcomeMatrix matrix = run_campaign(inputs);
    const RowSummary& reverse_row = matrix.rows.at("ACC 1.2.1/Reverse");
    CHECK(reverse_row.worst == Classification::Collision);
    CHECK(reverse_row.n_runs == 1);
    CHECK(reverse_row.n_failures == 1);
    CHECK(reverse_row.evidenced);

    const RowSummary& more_row = matrix.rows.at("ACC 1.1.1/More");
    CHECK(more_row.worst == Classification::Success);
    CHECK(more_row.n_failures == 0);
    CHECK_FALSE(more_row.evidenced);
}
