#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hazopwb/guideword.hpp"
#include "hazopwb/model.hpp"
#include "hazopwb/validation.hpp"

namespace hazopwb {

// Scenario use-case framing one analysis session. Field set follows the
// conventional use-case template: environment, goal, scope, pre/end
// conditions, actors, trigger, stepped description with branching extension.
struct Step {
    int index = 0;
    std::string action;
};

struct UseCase {
    std::string id; // e.g. "T_RDR_ACC_2"
    std::string title;
    std::string primary_environment;
    std::string goal_in_context;
    std::string scope; // may be empty
    std::vector<std::string> pre_conditions;
    std::vector<std::string> success_end_conditions;
    std::vector<std::string> failed_end_conditions;
    std::vector<std::string> actors;
    std::string trigger;
    std::vector<Step> description;
    std::vector<Step> extension;
};

enum class DsrKind {
    LikelihoodReduction,
    Mitigation,
    PlausibilityCheck,
    PerformanceBound,
    ModeTransition,
};

struct Dsr {
    std::string id;
    std::string text;
    DsrKind kind = DsrKind::Mitigation;
    std::vector<std::string> evidence_refs; // SimOutcome ids, may be empty
};

enum class Disposition { Analysed, NotApplicable, SameAs };

struct HazopEntry {
    std::string row_id; // e.g. "ACC 1.1.1/More"
    std::string function_id;
    std::string parameter_id;
    Guideword guideword = Guideword::NoOrNot;
    std::optional<std::string> mode; // absent means "all modes"
    std::string deviation;
    std::optional<std::string> hazard;
    std::string situation;
    std::optional<std::string> consequences;
    std::vector<std::string> causes;
    std::vector<std::string> dsrs; // DSR ids
    Disposition disposition = Disposition::Analysed;
    std::string same_as; // target row_id, when disposition == SameAs
};

// One document may hold many entries; DSRs are declared alongside so that
// rows can cite them by id.
struct Worksheet {
    std::optional<std::string> usecase_id;
    std::vector<HazopEntry> entries;
    std::vector<Dsr> dsrs;
};

// Named optional lint rules, individually switchable.
struct RuleSet {
    std::set<std::string> enabled;

    bool has(const std::string& name) const { return enabled.count(name) > 0; }
    static const std::set<std::string>& known();
    // Throws std::invalid_argument on an unknown rule name.
    static RuleSet parse(const std::vector<std::string>& names);
};

inline constexpr const char* kRuleReverseNeedsPlausibility = "reverse-needs-plausibility";

// Missing-element violations are named after the use-case element,
// e.g. "missing-element:goal-in-context". Named rules from the invariants:
// "no-failed-end-condition", "non-contiguous-steps".
ValidationReport validate_usecase(const UseCase& uc);

// Cross-document check: ids unique across the collection.
ValidationReport validate_usecases(const std::vector<UseCase>& ucs);

// Structural invariants always apply: duplicate-cell, hazard-without-cause,
// hazard-without-consequence, same-as-missing-target, same-as-cycle,
// dangling-dsr, unknown-function, unknown-parameter, parameter-not-in-function.
// Optional rules (RuleSet): reverse-needs-plausibility — an analysed Reverse
// row on a parameter with sign_meaningful=false and a nonnegative
// physical_range must cite at least one plausibility-check DSR.
ValidationReport lint_worksheet(const Worksheet& ws, const SystemModel& model,
                                const RuleSet& rules);

std::string_view to_string(DsrKind kind);
std::optional<DsrKind> parse_dsr_kind(std::string_view s);

} // namespace hazopwb
