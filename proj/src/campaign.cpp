#include "hazopwb/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hazopwb/rng.hpp"
#include "hazopwb/simulator.hpp"

namespace hazopwb {

BindingReport bind_parameters(const SystemModel& model,
                              const std::vector<SensorChannel>& channels,
                              const std::map<std::string, std::string>& overrides) {
    std::map<Quantity, std::vector<const SensorChannel*>> by_quantity;
    std::map<std::string, const SensorChannel*> by_id;
    for (const auto& ch : channels) {
        by_quantity[ch.quantity].push_back(&ch);
        by_id[ch.id] = &ch;
    }

    BindingReport report;
    for (const Capability* cap : model.all_capabilities()) {
        for (const Function* fn : model.functions_of(*cap)) {
            for (const auto& param : fn->parameters) {
                auto override_it = overrides.find(param.id);
                if (override_it != overrides.end()) {
                    auto ch = by_id.find(override_it->second);
                    if (ch == by_id.end())
                        throw std::invalid_argument("binding override for '" + param.id +
                                                    "' names unknown channel '" +
                                                    override_it->second + "'");
                    report.bound[param.id] = ch->second->id;
                    continue;
                }
                if (!param.quantity) {
                    report.unbound.push_back(param.id);
                    continue;
                }
                const Quantity q = *parse_quantity(*param.quantity);
                auto candidates = by_quantity.find(q);
                if (candidates == by_quantity.end() || candidates->second.empty()) {
                    report.unbound.push_back(param.id);
                    continue;
                }
                if (candidates->second.size() > 1) {
                    throw std::invalid_argument(
                        "ambiguous binding for parameter '" + param.id + "': channels '" +
                        candidates->second[0]->id + "' and '" + candidates->second[1]->id +
                        "' both carry " + std::string(to_string(q)) +
                        "; add an explicit override");
                }
                report.bound[param.id] = candidates->second[0]->id;
            }
        }
    }
    return report;
}

std::string sanitize_run_key(const std::string& key) {
    std::string out;
    out.reserve(key.size());
    for (char c : key) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '.' || c == '_';
        out.push_back(ok ? c : '_');
    }
    return out;
}

namespace {

std::string tracker_canon(const TrackerConfig& tc) {
    std::ostringstream os;
    os << "discard=" << (tc.discard_history_on_reclass ? 1 : 0)
       << ";horizon=" << tc.history_horizon;
    return os.str();
}

struct PlannedRun {
    const HazopEntry* row = nullptr;
    const ScenarioDoc* doc = nullptr;
    std::string channel_id;
    std::size_t magnitude_index = 0;
    std::size_t variant_index = 0;
    std::uint64_t seed = 0;
    std::string run_key;
};

MagnitudeVariant default_variant() {
    MagnitudeVariant v;
    v.canon = "{}";
    return v;
}

} // namespace

OutcomeMatrix run_campaign(const CampaignInputs& inputs) {
    const CampaignSpec& spec = inputs.spec;

    std::vector<TrackerConfig> variants = spec.tracker_variants;
    if (variants.empty()) variants.push_back(TrackerConfig{});

    // Scenarios in id order so list order never matters.
    std::vector<const ScenarioDoc*> scenarios;
    for (const auto& doc : inputs.scenarios) scenarios.push_back(&doc);
    std::sort(scenarios.begin(), scenarios.end(), [](const ScenarioDoc* a, const ScenarioDoc* b) {
        return a->scenario.id < b->scenario.id;
    });

    // Bindings and monitor ranges are per scenario (each has its own suite).
    std::map<const ScenarioDoc*, BindingReport> bindings;
    std::map<const ScenarioDoc*, std::map<Quantity, Interval>> ranges;
    for (const ScenarioDoc* doc : scenarios) {
        bindings[doc] = bind_parameters(inputs.model, doc->channels, spec.binding_overrides);
        auto r = default_monitor_ranges();
        for (const auto& [param_id, channel_id] : bindings[doc].bound) {
            const Parameter* param = inputs.model.find_parameter(param_id);
            if (!param || !param->physical_range) continue;
            for (const auto& ch : doc->channels) {
                if (ch.id == channel_id) r[ch.quantity] = *param->physical_range;
            }
        }
        ranges[doc] = r;
    }

    // Analysed rows in row_id order.
    std::vector<const HazopEntry*> rows;
    for (const auto& e : inputs.worksheet.entries) {
        if (e.disposition == Disposition::Analysed) rows.push_back(&e);
    }
    std::sort(rows.begin(), rows.end(),
              [](const HazopEntry* a, const HazopEntry* b) { return a->row_id < b->row_id; });

    static const std::vector<MagnitudeVariant> kDefaultGrid = {default_variant()};

    OutcomeMatrix matrix;
    std::vector<PlannedRun> planned;
    for (const HazopEntry* row : rows) {
        bool bound_somewhere = false;
        for (const ScenarioDoc* doc : scenarios) {
            const auto& binding = bindings[doc].bound;
            auto ch = binding.find(row->parameter_id);
            if (ch == binding.end()) continue;
            bound_somewhere = true;

            const auto grid_it = spec.magnitude_grid.find(row->guideword);
            const std::vector<MagnitudeVariant>& grid =
                grid_it == spec.magnitude_grid.end() ? kDefaultGrid : grid_it->second;
            for (std::size_t m = 0; m < grid.size(); ++m) {
                for (std::size_t v = 0; v < variants.size(); ++v) {
                    PlannedRun run;
                    run.row = row;
                    run.doc = doc;
                    run.channel_id = ch->second;
                    run.magnitude_index = m;
                    run.variant_index = v;
                    std::uint64_t h = fnv1a64(row->row_id);
                    h = fnv1a64(doc->scenario.id, h);
                    h = fnv1a64(grid[m].canon, h);
                    h = fnv1a64(tracker_canon(variants[v]), h);
                    run.seed = h;
                    std::ostringstream key;
                    key << row->row_id << '|' << doc->scenario.id << "|m" << m << "|v" << v;
                    run.run_key = key.str();
                    planned.push_back(std::move(run));
                }
            }
        }
        if (!bound_somewhere) matrix.unsimulated.push_back(row->row_id);
    }

    std::sort(planned.begin(), planned.end(),
              [](const PlannedRun& a, const PlannedRun& b) { return a.run_key < b.run_key; });

    std::string trace_dir;
    if (!inputs.out_dir.empty()) {
        trace_dir = inputs.out_dir + "/traces";
        std::filesystem::create_directories(trace_dir);
    }

    // Validate every tuple before running anything: a rejected run aborts
    // the whole campaign with the offending tuple named.
    auto build_inputs = [&](const PlannedRun& run) {
        const auto grid_it = spec.magnitude_grid.find(run.row->guideword);
        const std::vector<MagnitudeVariant>& grid =
            grid_it == spec.magnitude_grid.end() ? kDefaultGrid : grid_it->second;
        const MagnitudeVariant& variant = grid[run.magnitude_index];

        RunInputs ri;
        ri.scenario = run.doc->scenario;
        ri.scenario.seed = run.seed;
        ri.channels = run.doc->channels;
        InjectionSpec inj;
        inj.channel_id = run.channel_id;
        inj.guideword = run.row->guideword;
        inj.t_start = variant.t_start.value_or(0.0);
        inj.t_end = variant.t_end;
        inj.magnitude = variant.block;
        inj.spurious_target = variant.spurious_target;
        ri.injections = {inj};
        ri.tracker = variants[run.variant_index];
        ri.monitor_enabled = spec.monitor_enabled;
        ri.config = inputs.config;
        ri.monitor_ranges = ranges.at(run.doc);
        ri.outcome_id = run.run_key;
        if (!trace_dir.empty()) {
            ri.trace_path = trace_dir + "/" + sanitize_run_key(run.run_key) + ".csv";
        }
        return ri;
    };

    for (const auto& run : planned) {
        try {
            RunInputs ri = build_inputs(run);
            validate_scenario(ri.scenario, ri.config.vehicle_width);
            validate_injections(ri.injections, ri.channels, ri.scenario);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("campaign run '" + run.run_key +
                                        "' rejected: " + e.what());
        }
    }

    std::vector<SimOutcome> outcomes(planned.size());
    const int jobs = std::max(1, inputs.jobs);
    if (jobs == 1 || planned.size() <= 1) {
        for (std::size_t i = 0; i < planned.size(); ++i) {
            outcomes[i] = run_scenario(build_inputs(planned[i]));
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= planned.size()) return;
                outcomes[i] = run_scenario(build_inputs(planned[i]));
            }
        };
        std::vector<std::thread> pool;
        const int n = std::min<int>(jobs, static_cast<int>(planned.size()));
        pool.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (std::size_t i = 0; i < planned.size(); ++i) {
        const PlannedRun& run = planned[i];
        RunRecord record;
        record.run_key = run.run_key;
        record.row_id = run.row->row_id;
        record.scenario_id = run.doc->scenario.id;
        record.magnitude_index = run.magnitude_index;
        record.variant_index = run.variant_index;
        record.seed = run.seed;
        record.outcome = outcomes[i];
        if (!trace_dir.empty()) {
            // Matrix artifacts are location-independent: paths relative to out_dir.
            record.outcome.trace_path = "traces/" + sanitize_run_key(run.run_key) + ".csv";
        }

        RowSummary& summary = matrix.rows[run.row->row_id];
        summary.outcome_ids.push_back(run.run_key);
        summary.n_runs += 1;
        if (record.outcome.classification != Classification::Success) {
            summary.n_failures += 1;
            if (run.row->hazard) summary.evidenced = true;
        }
        if (classification_severity(record.outcome.classification) >
            classification_severity(summary.worst)) {
            summary.worst = record.outcome.classification;
        }
        matrix.runs.push_back(std::move(record));
    }
    return matrix;
}

DiscrepancyReport evidence_check(const OutcomeMatrix& matrix, const Worksheet& worksheet) {
    DiscrepancyReport report;
    for (const auto& entry : worksheet.entries) {
        auto it = matrix.rows.find(entry.row_id);
        if (it == matrix.rows.end()) continue; // unsimulated or not analysed
        const RowSummary& summary = it->second;
        const bool claims_hazard = entry.hazard.has_value();
        if (claims_hazard && summary.n_failures == 0) {
            report.items.push_back({entry.row_id, "unevidenced-hazard"});
        } else if (!claims_hazard && summary.n_failures > 0) {
            report.items.push_back({entry.row_id, "unclaimed-hazard"});
        }
    }
    return report;
}

} // namespace hazopwb
