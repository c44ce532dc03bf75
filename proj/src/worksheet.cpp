#include "hazopwb/worksheet.hpp"

#include <map>
#include <stdexcept>
#include <tuple>

namespace hazopwb {

const std::set<std::string>& RuleSet::known() {
    static const std::set<std::string> rules = {kRuleReverseNeedsPlausibility};
    return rules;
}

RuleSet RuleSet::parse(const std::vector<std::string>& names) {
    RuleSet rs;
    for (const auto& n : names) {
        if (!known().count(n)) throw std::invalid_argument("unknown lint rule '" + n + "'");
        rs.enabled.insert(n);
    }
    return rs;
}

namespace {

void check_steps(const std::vector<Step>& steps, const std::string& uc_id, const char* element,
                 ValidationReport& report) {
    int expected = 1;
    for (const auto& step : steps) {
        if (step.index != expected) {
            report.add("non-contiguous-steps", uc_id,
                       std::string(element) + " step indices must run 1,2,... (found " +
                           std::to_string(step.index) + " where " + std::to_string(expected) +
                           " expected)");
            return;
        }
        ++expected;
    }
}

} // namespace

ValidationReport validate_usecase(const UseCase& uc) {
    ValidationReport report;
    auto missing = [&](const char* element) {
        report.add(std::string("missing-element:") + element, uc.id,
                   std::string("use case is missing element '") + element + "'");
    };

    if (uc.id.empty()) missing("id");
    if (uc.primary_environment.empty()) missing("primary-environment");
    if (uc.goal_in_context.empty()) missing("goal-in-context");
    if (uc.success_end_conditions.empty()) missing("success-end-conditions");
    if (uc.actors.empty()) missing("actors");
    if (uc.trigger.empty()) missing("trigger");
    if (uc.description.empty()) missing("description");
    if (uc.failed_end_conditions.empty()) {
        report.add("no-failed-end-condition", uc.id,
                   "failed end conditions must list the hazards under analysis");
    }
    check_steps(uc.description, uc.id, "description", report);
    check_steps(uc.extension, uc.id, "extension", report);
    return report;
}

ValidationReport validate_usecases(const std::vector<UseCase>& ucs) {
    ValidationReport report;
    std::map<std::string, int> count;
    for (const auto& uc : ucs) {
        report.merge(validate_usecase(uc));
        count[uc.id] += 1;
    }
    for (const auto& [id, n] : count) {
        if (n > 1)
            report.add("duplicate-usecase-id", id, "declared " + std::to_string(n) + " times");
    }
    return report;
}

ValidationReport lint_worksheet(const Worksheet& ws, const SystemModel& model,
                                const RuleSet& rules) {
    ValidationReport report;

    std::map<std::string, const HazopEntry*> by_row_id;
    std::map<std::string, const Dsr*> dsr_by_id;
    for (const auto& d : ws.dsrs) {
        if (d.text.empty()) report.add("empty-dsr-text", d.id, "DSR has no text");
        if (!dsr_by_id.emplace(d.id, &d).second)
            report.add("duplicate-dsr-id", d.id, "DSR id repeats");
    }

    std::map<std::tuple<std::string, std::string, Guideword, std::string>, int> cell_count;
    for (const auto& e : ws.entries) {
        if (!by_row_id.emplace(e.row_id, &e).second)
            report.add("duplicate-row-id", e.row_id, "row id repeats");
        cell_count[{e.function_id, e.parameter_id, e.guideword, e.mode.value_or("")}] += 1;
    }
    for (const auto& [cell, n] : cell_count) {
        if (n > 1) {
            report.add("duplicate-cell", std::get<1>(cell) + "/" +
                                             std::string(guideword_label(std::get<2>(cell))),
                       "cell analysed by " + std::to_string(n) + " rows");
        }
    }

    for (const auto& e : ws.entries) {
        const Function* fn = model.find_function(e.function_id);
        if (!fn) {
            report.add("unknown-function", e.row_id,
                       "function '" + e.function_id + "' not in model");
        }
        const Parameter* param = model.find_parameter(e.parameter_id);
        if (!param) {
            report.add("unknown-parameter", e.row_id,
                       "parameter '" + e.parameter_id + "' not in model");
        } else if (fn) {
            bool in_fn = false;
            for (const auto& p : fn->parameters)
                if (p.id == e.parameter_id) in_fn = true;
            if (!in_fn)
                report.add("parameter-not-in-function", e.row_id,
                           "parameter '" + e.parameter_id + "' does not belong to function '" +
                               e.function_id + "'");
        }

        if (e.hazard) {
            if (!e.consequences || e.consequences->empty())
                report.add("hazard-without-consequence", e.row_id,
                           "hazard stated but consequences empty");
            if (e.causes.empty())
                report.add("hazard-without-cause", e.row_id, "hazard stated but causes empty");
        }
        for (const auto& d : e.dsrs) {
            if (!dsr_by_id.count(d))
                report.add("dangling-dsr", e.row_id, "cites unknown DSR '" + d + "'");
        }
        if (e.disposition == Disposition::SameAs && !by_row_id.count(e.same_as)) {
            report.add("same-as-missing-target", e.row_id,
                       "same_as target '" + e.same_as + "' not in worksheet");
        }

        if (rules.has(kRuleReverseNeedsPlausibility) && param &&
            e.disposition == Disposition::Analysed && e.guideword == Guideword::Reverse &&
            !param->sign_meaningful && param->physical_range &&
            param->physical_range->min >= 0.0) {
            bool cited = false;
            for (const auto& d : e.dsrs) {
                auto it = dsr_by_id.find(d);
                if (it != dsr_by_id.end() && it->second->kind == DsrKind::PlausibilityCheck)
                    cited = true;
            }
            if (!cited) {
                report.add(kRuleReverseNeedsPlausibility, e.row_id,
                           "Reverse on a nonnegative unsigned parameter needs a "
                           "plausibility-check DSR");
            }
        }
    }

    // same_as chains must terminate.
    for (const auto& e : ws.entries) {
        if (e.disposition != Disposition::SameAs) continue;
        std::set<std::string> seen = {e.row_id};
        const HazopEntry* cur = &e;
        while (cur->disposition == Disposition::SameAs) {
            auto it = by_row_id.find(cur->same_as);
            if (it == by_row_id.end()) break; // reported above
            cur = it->second;
            if (!seen.insert(cur->row_id).second) {
                report.add("same-as-cycle", e.row_id, "same_as chain revisits '" + cur->row_id +
                                                          "'");
                break;
            }
        }
    }

    return report;
}

std::string_view to_string(DsrKind kind) {
    switch (kind) {
    case DsrKind::LikelihoodReduction: return "likelihood-reduction";
    case DsrKind::Mitigation: return "mitigation";
    case DsrKind::PlausibilityCheck: return "plausibility-check";
    case DsrKind::PerformanceBound: return "performance-bound";
    case DsrKind::ModeTransition: return "mode-transition";
    }
    return "?";
}

std::optional<DsrKind> parse_dsr_kind(std::string_view s) {
    if (s == "likelihood-reduction") return DsrKind::LikelihoodReduction;
    if (s == "mitigation") return DsrKind::Mitigation;
    if (s == "plausibility-check") return DsrKind::PlausibilityCheck;
    if (s == "performance-bound") return DsrKind::PerformanceBound;
    if (s == "mode-transition") return DsrKind::ModeTransition;
    return std::nullopt;
}

} // namespace hazopwb
