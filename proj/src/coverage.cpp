#include "hazopwb/coverage.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace hazopwb {

std::vector<DeviationCell> enumerate_cells(
    const SystemModel& model, const std::optional<std::vector<std::string>>& capability_filter,
    const std::optional<std::vector<std::string>>& modes) {
    std::vector<const Capability*> caps;
    if (capability_filter) {
        for (const auto& id : *capability_filter) {
            const Capability* cap = model.find_capability(id);
            if (!cap) throw std::invalid_argument("unknown capability id '" + id + "'");
            caps.push_back(cap);
        }
    } else {
        caps = model.all_capabilities();
    }

    // Unique functions across the selection, then sort by id for the
    // documented output order.
    std::map<std::string, const Function*> functions;
    for (const Capability* cap : caps) {
        for (const Function* fn : model.functions_of(*cap)) functions.emplace(fn->id, fn);
    }

    std::vector<std::optional<std::string>> mode_axis;
    if (modes && !modes->empty()) {
        for (const auto& m : *modes) mode_axis.emplace_back(m);
    } else {
        mode_axis.emplace_back(std::nullopt);
    }

    std::vector<DeviationCell> cells;
    for (const auto& [fid, fn] : functions) {
        std::vector<const Parameter*> params;
        for (const auto& p : fn->parameters) params.push_back(&p);
        std::sort(params.begin(), params.end(),
                  [](const Parameter* a, const Parameter* b) { return a->id < b->id; });
        for (const Parameter* p : params) {
            for (Guideword g : all_guidewords()) {
                for (const auto& mode : mode_axis) {
                    cells.push_back({fid, p->id, g, mode});
                }
            }
        }
    }
    return cells;
}

CoverageReport check_coverage(const std::vector<DeviationCell>& cells,
                              const std::vector<HazopEntry>& entries) {
    using CellKey = std::tuple<std::string, std::string, Guideword, std::string>;
    auto key_of_cell = [](const DeviationCell& c) {
        return CellKey{c.function_id, c.parameter_id, c.guideword, c.mode.value_or("")};
    };
    auto key_of_entry = [](const HazopEntry& e) {
        return CellKey{e.function_id, e.parameter_id, e.guideword, e.mode.value_or("")};
    };

    std::set<CellKey> cell_set;
    for (const auto& c : cells) cell_set.insert(key_of_cell(c));

    std::map<CellKey, std::vector<const HazopEntry*>> hits;
    CoverageReport report;
    report.total_cells = cells.size();
    for (const auto& e : entries) {
        const CellKey k = key_of_entry(e);
        if (!cell_set.count(k)) {
            report.unknown.push_back(e.row_id);
            continue;
        }
        hits[k].push_back(&e);
    }
    for (const auto& [k, rows] : hits) {
        if (rows.size() > 1) {
            for (const HazopEntry* e : rows) report.duplicates.push_back(e->row_id);
        }
    }
    for (const auto& c : cells) {
        if (!hits.count(key_of_cell(c))) report.missing.push_back(c);
    }
    report.covered_fraction =
        cells.empty() ? 1.0
                      : static_cast<double>(cells.size() - report.missing.size()) /
                            static_cast<double>(cells.size());
    return report;
}

} // namespace hazopwb
