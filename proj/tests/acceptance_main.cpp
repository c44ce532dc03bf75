// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Each criterion checks the library end to end against frozen expectations
// and independent oracles.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hazopwb/campaign.hpp"
#include "hazopwb/coverage.hpp"
#include "hazopwb/json_io.hpp"
#include "hazopwb/kinematics.hpp"
#include "hazopwb/rng.hpp"
#include "hazopwb/simulator.hpp"
#include "hazopwb/worksheet.hpp"

using namespace hazopwb;

namespace {

const std::string kFixtures = HAZOPWB_FIXTURES;

struct Check {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

bool rel_close(double a, double b, double tol = 1e-9) {
    return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(b));
}

CampaignInputs load_campaign_inputs(const std::string& name) {
    const CampaignSpec spec = load_campaign(kFixtures + "/campaigns/" + name + ".json");
    CampaignInputs inputs;
    inputs.model = load_model(spec.base_dir / spec.model_ref);
    inputs.worksheet = load_worksheet(spec.base_dir / spec.worksheet_ref);
    for (const auto& ref : spec.scenario_refs) {
        inputs.scenarios.push_back(load_scenario(spec.base_dir / ref));
    }
    inputs.spec = spec;
    return inputs;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --- criterion 1: guideword set -------------------------------------------

Check criterion_guidewords() {
    Check c;
    const struct {
        Guideword g;
        const char* label;
        const char* interpretation;
    } expected[] = {
        {Guideword::NoOrNot, "No or Not",
         "Failure to identify a relevant element of the scene (false negative)"},
        {Guideword::More, "More",
         "Identifying more elements in the scene than are relevant (multiple false positives)"},
        {Guideword::Less, "Less",
         "Identifying fewer elements in the scene than are relevant (multiple false negatives)"},
        {Guideword::AsWellAs, "As well as",
         "Identifying element in the scene that is not there (false positive)"},
        {Guideword::PartOf, "Part of",
         "Failing to identify element in the scene that is there (false negative)"},
        {Guideword::OtherThanInstead, "Other than/Instead",
         "Incorrect classification, e.g. static object rather than pedestrian"},
        {Guideword::Reverse, "Reverse",
         "Change of sign in a scalar or vector value, e.g. pedestrian is moving towards rather "
         "than away from ego vehicle"},
        {Guideword::Early, "Early",
         "Object identified earlier than necessary for safe behaviour, perhaps triggering "
         "unnecessary response"},
        {Guideword::Late, "Late",
         "Object identified later than necessary for safe behaviour"},
        {Guideword::Intermittent, "Intermittent",
         "Element of scene present in some images, but not in others, or classification changes "
         "from image to image"},
    };
    const auto all = all_guidewords();
    c.require(all.size() == 10, "expected exactly 10 guidewords");
    for (std::size_t i = 0; i < all.size(); ++i) {
        c.require(all[i] == expected[i].g, "declaration order mismatch at index " +
                                               std::to_string(i));
        c.require(guideword_label(all[i]) == expected[i].label,
                  std::string("label mismatch for ") + expected[i].label);
        c.require(guideword_interpretation(all[i]) == expected[i].interpretation,
                  std::string("interpretation mismatch for ") + expected[i].label);
    }
    c.require(!parse_guideword("Before").has_value(), "Before must not parse");
    c.require(!parse_guideword("After").has_value(), "After must not parse");
    return c;
}

// --- criterion 2: kinematics ------------------------------------------------

Check criterion_kinematics() {
    Check c;
    c.require(rel_close(lateral_accel(20.0, 200.0), 2.0), "lateral_accel(20,200) != 2.0");
    c.require(rel_close(max_speed_for_radius(125.0, 5.0), 25.0),
              "max_speed_for_radius(125,5) != 25.0");
    const LateralLimits limits;
    const LimitCheck nominal = check_limit(3.2, limits, Regime::Nominal);
    c.require(!nominal.within && rel_close(nominal.excess, 0.2, 1e-9),
              "3.2 nominal must violate by 0.2");
    c.require(check_limit(5.0, limits, Regime::Emergency).within,
              "5.0 emergency must pass at the boundary");
    c.require(check_limit(-5.0, limits, Regime::Emergency).within,
              "-5.0 emergency must pass at the boundary");
    return c;
}

// --- criterion 3: enumeration cardinality -----------------------------------

SystemModel random_model(std::uint64_t seed) {
    Rng rng(seed);
    SystemModel m;
    m.id = "random";
    Service svc;
    svc.id = "svc";
    svc.name = "svc";
    svc.level = 2;
    const int n_caps = 1 + static_cast<int>(rng.next_u64() % 3);
    for (int cap_i = 0; cap_i < n_caps; ++cap_i) {
        Capability cap;
        cap.id = "cap-" + std::to_string(cap_i);
        cap.name = cap.id;
        cap.controls = {Control::Acceleration};
        const int n_fns = 1 + static_cast<int>(rng.next_u64() % 4);
        for (int fn_i = 0; fn_i < n_fns; ++fn_i) {
            Function fn;
            fn.id = std::to_string(cap_i) + "." + std::to_string(fn_i);
            fn.name = fn.id;
            const int n_params = 1 + static_cast<int>(rng.next_u64() % 4);
            for (int p_i = 0; p_i < n_params; ++p_i) {
                Parameter p;
                p.id = fn.id + "." + std::to_string(p_i);
                p.name = p.id;
                p.kind = ParameterKind::Scalar;
                p.unit = "m";
                fn.parameters.push_back(p);
            }
            cap.functions.push_back(fn);
        }
        svc.capabilities.push_back(cap);
    }
    m.services.push_back(svc);
    return m;
}

Check criterion_enumeration() {
    Check c;
    for (std::uint64_t seed = 11; seed < 16; ++seed) {
        const SystemModel m = random_model(seed);
        const std::vector<std::string> modes =
            (seed % 2 == 0) ? std::vector<std::string>{"drive-off", "speed-hold"}
                            : std::vector<std::string>{};

        // Brute-force nested-loop oracle over the declaration tree.
        std::set<std::string> oracle;
        std::size_t oracle_count = 0;
        for (const auto& svc : m.services) {
            for (const auto& cap : svc.capabilities) {
                for (const auto& fn : cap.functions) {
                    for (const auto& p : fn.parameters) {
                        for (Guideword g : all_guidewords()) {
                            const std::size_t n_modes = modes.empty() ? 1 : modes.size();
                            for (std::size_t mi = 0; mi < n_modes; ++mi) {
                                ++oracle_count;
                                oracle.insert(fn.id + "|" + p.id + "|" +
                                              std::string(guideword_token(g)) + "|" +
                                              (modes.empty() ? "" : modes[mi]));
                            }
                        }
                    }
                }
            }
        }

        const auto cells = modes.empty()
                               ? enumerate_cells(m)
                               : enumerate_cells(m, std::nullopt, std::optional(modes));
        c.require(cells.size() == oracle_count,
                  "cell count mismatch on seed " + std::to_string(seed));
        std::set<std::string> got;
        for (const auto& cell : cells) {
            got.insert(cell.function_id + "|" + cell.parameter_id + "|" +
                       std::string(guideword_token(cell.guideword)) + "|" +
                       cell.mode.value_or(""));
        }
        c.require(got == oracle, "cell set mismatch on seed " + std::to_string(seed));
        c.require(got.size() == cells.size(), "duplicate cells on seed " + std::to_string(seed));
    }
    return c;
}

// --- criterion 4: reverse / plausibility pair ---------------------------------

Check criterion_reverse_plausibility() {
    Check c;
    const std::filesystem::path out_base = std::filesystem::temp_directory_path() /
                                           "hazopwb_acceptance_reverse";
    std::filesystem::remove_all(out_base);

    CampaignInputs off = load_campaign_inputs("acc_reverse_monitor_off");
    off.out_dir = (out_base / "off").string();
    const OutcomeMatrix matrix_off = run_campaign(off);
    int off_collisions = 0;
    for (const auto& run : matrix_off.runs) {
        if (run.outcome.classification == Classification::Collision) ++off_collisions;
    }
    c.require(off_collisions >= 1, "monitor-off campaign produced no collision");

    CampaignInputs on = load_campaign_inputs("acc_reverse_monitor_on");
    on.out_dir = (out_base / "on").string();
    const OutcomeMatrix matrix_on = run_campaign(on);
    int on_collisions = 0;
    for (const auto& run : matrix_on.runs) {
        if (run.outcome.classification == Classification::Collision) ++on_collisions;
        c.require(run.outcome.plausibility_flags > 0, "monitor-on run rejected nothing");

        // Trace assertion: the gap fed to the controller is never negative.
        const std::string trace =
            slurp(std::filesystem::path(on.out_dir) / run.outcome.trace_path);
        c.require(!trace.empty(), "monitor-on trace missing");
        std::istringstream lines(trace);
        std::string line;
        std::getline(lines, line); // header
        bool any_gap = false;
        while (std::getline(lines, line)) {
            std::stringstream ss(line);
            std::string cell;
            for (int col = 0; std::getline(ss, cell, ','); ++col) {
                if (col == 7 && !cell.empty()) {
                    any_gap = true;
                    if (std::stod(cell) < 0.0) {
                        c.require(false, "monitor-on fed a negative gap to the controller");
                    }
                }
            }
        }
        c.require(any_gap, "monitor-on trace carries no gap estimates");
    }
    c.require(on_collisions == 0, "monitor-on campaign still collided");
    return c;
}

// --- criterion 5: late-detection threshold -------------------------------------

Check criterion_late_threshold() {
    Check c;
    ScenarioDoc doc = load_scenario(kFixtures + "/scenarios/aeb_static.json");
    const double v = doc.scenario.ego_init.v;       // 20 m/s
    const double d = doc.scenario.targets[0].initial_gap; // 50 m
    const SimConfig cfg;
    const double T = cfg.controller.aeb_ttc;   // 1.5 s
    const double a_b = cfg.controller.aeb_decel; // 6 m/s^2
    const double dt = doc.scenario.dt;

    auto run_with_latency = [&](double latency) {
        RunInputs inputs;
        inputs.scenario = doc.scenario;
        inputs.channels = doc.channels;
        if (latency > 0.0) {
            InjectionSpec late;
            late.channel_id = "rdr_present";
            late.guideword = Guideword::Late;
            late.magnitude.delay = latency;
            inputs.injections.push_back(late);
        }
        return run_scenario(inputs).classification == Classification::Collision;
    };

    // Brute force both the closed form and the simulation over the same grid.
    double oracle_flip = -1.0;
    double sim_flip = -1.0;
    for (double latency = 0.0; latency <= 1.3 + 1e-9; latency += 0.05) {
        const bool oracle_collides = v * latency + v * T + v * v / (2.0 * a_b) > d;
        if (oracle_collides && oracle_flip < 0.0) oracle_flip = latency;
        if (run_with_latency(latency) && sim_flip < 0.0) sim_flip = latency;
    }
    c.require(oracle_flip >= 0.0, "closed form never collides on the grid");
    c.require(sim_flip >= 0.0, "simulation never collides on the grid");
    if (c.pass) {
        c.require(std::fabs(sim_flip - oracle_flip) <= 5.0 * dt + 1e-9,
                  "flip points differ by more than 5 dt: sim " + std::to_string(sim_flip) +
                      " vs oracle " + std::to_string(oracle_flip));
    }
    c.require(run_with_latency(1.2), "1.2 s latency must collide");
    return c;
}

// --- criterion 6: intermittent + discard-history --------------------------------

Check criterion_flicker_discard() {
    Check c;
    const ScenarioDoc doc = load_scenario(kFixtures + "/scenarios/aeb_crossing.json");
    InjectionSpec flick;
    flick.channel_id = "rdr_class";
    flick.guideword = Guideword::Intermittent;
    flick.t_start = 0.0;
    flick.magnitude.period = 0.02; // classification changes from frame to frame
    flick.magnitude.duty = 0.5;
    flick.magnitude.from_class = TargetClass::Pedestrian;
    flick.magnitude.to_class = TargetClass::Static;

    auto run_variant = [&](bool discard) {
        RunInputs inputs;
        inputs.scenario = doc.scenario;
        inputs.channels = doc.channels;
        inputs.injections = {flick};
        inputs.tracker.discard_history_on_reclass = discard;
        return run_scenario(inputs);
    };

    const SimOutcome keep = run_variant(false);
    const SimOutcome discard = run_variant(true);
    c.require(discard.classification == Classification::Collision,
              "discard-history run must collide");
    c.require(keep.classification == Classification::Success,
              "history-keeping run must stop for the pedestrian");
    c.require(keep.min_gap > 0.0 && keep.min_gap < 20.0,
              "history-keeping run should stop short of the crossing point");
    return c;
}

// --- criterion 7: determinism ----------------------------------------------------

Check criterion_determinism() {
    Check c;
    const std::filesystem::path base =
        std::filesystem::temp_directory_path() / "hazopwb_acceptance_determinism";
    std::filesystem::remove_all(base);

    auto execute = [&](const std::string& tag) {
        CampaignInputs inputs = load_campaign_inputs("default");
        inputs.out_dir = (base / tag).string();
        inputs.jobs = 4;
        const OutcomeMatrix matrix = run_campaign(inputs);
        std::ofstream out(base / tag / "matrix.json", std::ios::binary);
        out << matrix_to_json(matrix).dump(2) << "\n";
        return matrix;
    };
    execute("a");
    execute("b");

    c.require(slurp(base / "a" / "matrix.json") == slurp(base / "b" / "matrix.json"),
              "matrix JSON differs between executions");

    std::vector<std::filesystem::path> traces_a;
    for (const auto& entry : std::filesystem::directory_iterator(base / "a" / "traces")) {
        traces_a.push_back(entry.path());
    }
    std::sort(traces_a.begin(), traces_a.end());
    c.require(!traces_a.empty(), "campaign produced no traces");
    for (const auto& trace_a : traces_a) {
        const std::filesystem::path trace_b = base / "b" / "traces" / trace_a.filename();
        if (slurp(trace_a) != slurp(trace_b)) {
            c.require(false, "trace differs: " + trace_a.filename().string());
            break;
        }
    }
    return c;
}

// --- criterion 8: model composition rules ------------------------------------------

Check criterion_model_rules() {
    Check c;
    SystemModel m;
    m.id = "rules";
    Service svc;
    svc.id = "svc-l1";
    svc.name = "both axes";
    svc.level = 1;
    Capability cap;
    cap.id = "cap-both";
    cap.name = "Both";
    cap.controls = {Control::Steering, Control::Acceleration};
    svc.capabilities.push_back(cap);
    m.services.push_back(svc);

    const ValidationReport report = validate_model(m);
    const bool found = std::any_of(
        report.violations.begin(), report.violations.end(),
        [](const Violation& v) { return v.rule == "L1-dual-control" && v.subject_id == "svc-l1"; });
    c.require(found, "L1-dual-control violation missing");

    // The fixture model itself carries no violations.
    const ValidationReport fixture = validate_model(load_model(kFixtures + "/model/alks.json"));
    c.require(fixture.ok(), "fixture model must validate cleanly");
    return c;
}

// --- criterion 9: fixture coverage ---------------------------------------------------

Check criterion_fixture_coverage() {
    Check c;
    const SystemModel model = load_model(kFixtures + "/model/alks.json");
    const RuleSet rules = RuleSet::parse({"reverse-needs-plausibility"});

    std::vector<HazopEntry> all_entries;
    for (const char* name : {"alc", "acc", "aeb", "fcw"}) {
        const Worksheet ws =
            load_worksheet(kFixtures + "/worksheets/" + std::string(name) + ".json");
        const ValidationReport lint = lint_worksheet(ws, model, rules);
        c.require(lint.ok(), std::string(name) + " worksheet fails lint: " +
                                 (lint.ok() ? "" : lint.violations[0].rule));
        all_entries.insert(all_entries.end(), ws.entries.begin(), ws.entries.end());
    }

    const auto cells = enumerate_cells(model);
    const CoverageReport coverage = check_coverage(cells, all_entries);
    c.require(coverage.covered_fraction == 1.0,
              "combined fixture coverage is " + std::to_string(coverage.covered_fraction));
    c.require(coverage.unknown.empty(), "fixture rows outside the enumeration");

    // The rows named in the analysis narrative are present.
    auto has_row = [&](const std::string& param, Guideword g, const std::string& name_part) {
        return std::any_of(all_entries.begin(), all_entries.end(), [&](const HazopEntry& e) {
            if (e.parameter_id != param || e.guideword != g) return false;
            const Parameter* p = model.find_parameter(param);
            return p && p->name.find(name_part) != std::string::npos;
        });
    };
    c.require(has_row("ACC 1.1.1", Guideword::More, "Relative Velocity of Target Vehicle"),
              "ACC 1.1.1 relative-velocity row missing");
    c.require(std::any_of(all_entries.begin(), all_entries.end(),
                          [](const HazopEntry& e) {
                              return e.function_id == "ACC 1.2" &&
                                     e.guideword == Guideword::Reverse &&
                                     e.disposition == Disposition::Analysed &&
                                     !e.dsrs.empty();
                          }),
              "ACC 1.2 Reverse row with DSR missing");
    c.require(has_row("FCW 0.2.5", Guideword::NoOrNot, "Collision Warning"),
              "FCW 0.2.5 collision-warning row missing");
    return c;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        Check (*run)();
    };
    const Criterion criteria[] = {
        {1, "guideword set matches the revised table", criterion_guidewords},
        {2, "kinematics values and limit checks", criterion_kinematics},
        {3, "enumeration cardinality vs brute-force oracle", criterion_enumeration},
        {4, "reverse injection: monitor off collides, monitor on rejects",
         criterion_reverse_plausibility},
        {5, "late-detection flip matches the stopping-distance oracle",
         criterion_late_threshold},
        {6, "class flicker with history discard flips the outcome", criterion_flicker_discard},
        {7, "full campaign is byte-identical across executions", criterion_determinism},
        {8, "L1 dual-control composition rule", criterion_model_rules},
        {9, "fixture worksheets cover the cell space and pass lint",
         criterion_fixture_coverage},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        Check result;
        try {
            result = criterion.run();
        } catch (const std::exception& e) {
            result.pass = false;
            result.detail = std::string("exception: ") + e.what();
        }
        if (result.pass) {
            std::printf("[PASS] criterion %d: %s\n", criterion.id, criterion.name);
        } else {
            std::printf("[FAIL] criterion %d: %s — %s\n", criterion.id, criterion.name,
                        result.detail.c_str());
            ++failures;
        }
    }
    return failures;
}
