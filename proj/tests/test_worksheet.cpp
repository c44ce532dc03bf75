#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "hazopwb/json_io.hpp"
#include "hazopwb/worksheet.hpp"

using namespace hazopwb;

namespace {

const std::string kFixtures = HAZOPWB_FIXTURES;

bool has_rule(const ValidationReport& report, const std::string& rule) {
    return std::any_of(report.violations.begin(), report.violations.end(),
                       [&](const Violation& v) { return v.rule == rule; });
}

std::multiset<std::string> rule_multiset(const ValidationReport& report) {
    std::multiset<std::string> rules;
    for (const auto& v : report.violations) rules.insert(v.rule + "|" + v.subject_id);
    return rules;
}

UseCase fixture_usecase(const std::string& id) {
    for (auto& uc : load_usecases(kFixtures + "/usecases/alks_usecases.json")) {
        if (uc.id == id) return uc;
    }
    REQUIRE(false);
    return {};
}

} // namespace

TEST_CASE("fixture use cases validate cleanly") {
    const auto ucs = load_usecases(kFixtures + "/usecases/alks_usecases.json");
    CHECK(ucs.size() == 4);
    const ValidationReport report = validate_usecases(ucs);
    for (const auto& v : report.violations) {
        INFO(v.rule << " " << v.subject_id);
        CHECK(false);
    }
    const UseCase acc = fixture_usecase("T_RDR_ACC_2");
    CHECK(acc.goal_in_context == "System to detect target and maintain safe following distance.");
    CHECK(validate_usecase(acc).ok());
}

TEST_CASE("missing failed end conditions are flagged") {
    UseCase uc = fixture_usecase("T_RDR_ACC_2");
    uc.failed_end_conditions.clear();
    CHECK(has_rule(validate_usecase(uc), "no-failed-end-condition"));
}

TEST_CASE("non-contiguous step numbering is flagged") {
    UseCase uc = fixture_usecase("T_RDR_ACC_2");
    uc.description[1].index = 3; // 1,3
    CHECK(has_rule(validate_usecase(uc), "non-contiguous-steps"));

    uc = fixture_usecase("T_RDR_ACC_2");
    uc.description[0].index = 0; // must start at 1
    CHECK(has_rule(validate_usecase(uc), "non-contiguous-steps"));
}

TEST_CASE("missing template elements are named") {
    UseCase uc = fixture_usecase("T_RDR_ACC_2");
    uc.goal_in_context.clear();
    CHECK(has_rule(validate_usecase(uc), "missing-element:goal-in-context"));
    uc = fixture_usecase("T_RDR_ACC_2");
    uc.description.clear();
    CHECK(has_rule(validate_usecase(uc), "missing-element:description"));
}

TEST_CASE("duplicate use-case ids across a collection are flagged") {
    auto ucs = load_usecases(kFixtures + "/usecases/alks_usecases.json");
    ucs.push_back(ucs.front());
    CHECK(has_rule(validate_usecases(ucs), "duplicate-usecase-id"));
}

TEST_CASE("fixture worksheets lint cleanly with the reverse rule enabled") {
    const SystemModel model = load_model(kFixtures + "/model/alks.json");
    const RuleSet rules = RuleSet::parse({"reverse-needs-plausibility"});
    for (const char* name : {"acc", "alc", "aeb", "fcw", "acc_reverse_row"}) {
        const Worksheet ws =
            load_worksheet(kFixtures + "/worksheets/" + std::string(name) + ".json");
        const ValidationReport report = lint_worksheet(ws, model, rules);
        for (const auto& v : report.violations) {
            INFO(name << ": " << v.rule << " " << v.subject_id << " " << v.message);
            CHECK(false);
        }
    }
}

TEST_CASE("reverse on an unsigned bounded parameter needs a plausibility DSR") {
    const SystemModel model = load_model(kFixtures + "/model/alks.json");
    Worksheet ws = load_worksheet(kFixtures + "/worksheets/acc_reverse_row.json");
    ws.entries[0].dsrs.clear();
    const RuleSet rules = RuleSet::parse({"reverse-needs-plausibility"});
    CHECK(has_rule(lint_worksheet(ws, model, rules), "reverse-needs-plausibility"));

    // Rule off: same worksheet passes.
    CHECK(lint_worksheet(ws, model, RuleSet{}).ok());

    // A non-plausibility DSR does not satisfy the rule.
    ws.entries[0].dsrs = {"DSR-X"};
    ws.dsrs.push_back({"DSR-X", "bound the error", DsrKind::PerformanceBound, {}});
    CHECK(has_rule(lint_worksheet(ws, model, rules), "reverse-needs-plausibility"));
}

TEST_CASE("hazard rows need causes and consequences") {
    const SystemModel model = load_model(kFixtures + "/model/alks.json");
    Worksheet ws = load_worksheet(kFixtures + "/worksheets/acc_reverse_row.json");
    ws.entries[0].causes.clear();
    CHECK(has_rule(lint_worksheet(ws, model, RuleSet{}), "hazard-without-cause"));

    ws = load_worksheet(kFixtures + "/worksheets/acc_reverse_row.json");
    ws.entries[0].consequences.reset();
    CHECK(has_rule(lint_worksheet(ws, model, RuleSet{}), "hazard-without-consequence"));
}

TEST_CASE("same-as chains must exist and terminate") {
    const SystemModel model = load_model(kFixtures + "/model/alks.json");
    Worksheet ws = load_worksheet(kFixtures + "/worksheets/acc_reverse_row.json");

    HazopEntry a = ws.entries[0];
    a.row_id = "A";
    a.guideword = Guideword::More;
    a.hazard.reset();
    a.disposition = Disposition::SameAs;
    a.same_as = "B";
    HazopEntry b = a;
    b.row_id = "B";
    b.guideword = Guideword::Less;
    b.same_as = "A";
    ws.entries.push_back(a);
    ws.entries.push_back(b);
    const ValidationReport report = lint_worksheet(ws, model, RuleSet{});
    CHECK(has_rule(report, "same-as-cycle"));

    Worksheet ws2 = load_worksheet(kFixtures + "/worksheets/acc_reverse_row.json");
    HazopEntry c = ws2.entries[0];
    c.row_id = "C";
    c.guideword = Guideword::More;
    c.hazard.reset();
    c.disposition = Disposition::SameAs;
    c.same_as = "nowhere";
    ws2.entries.push_back(c);
    CHECK(has_rule(lint_worksheet(ws2, model, RuleSet{}), "same-as-missing-target"));
}

TEST_CASE("duplicate cells and unknown references are hard violations") {
    const SystemModel model = load_model(kFixtures + "/model/alks.json");
    Worksheet ws = load_worksheet(kFixtures + "/worksheets/acc_reverse_row.json");
    HazopEntry dup = ws.entries[0];
    dup.row_id = "another row, same cell";
    ws.entries.push_back(dup);
    const ValidationReport report = lint_worksheet(ws, model, RuleSet{});
    CHECK(has_rule(report, "duplicate-cell"));

    Worksheet ws2 = load_worksheet(kFixtures + "/worksheets/acc_reverse_row.json");
    ws2.entries[0].function_id = "NOPE 1.1";
    CHECK(has_rule(lint_worksheet(ws2, model, RuleSet{}), "unknown-function"));
    ws2 = load_worksheet(kFixtures + "/worksheets/acc_reverse_row.json");
    ws2.entries[0].parameter_id = "NOPE 1.1.1";
    CHECK(has_rule(lint_worksheet(ws2, model, RuleSet{}), "unknown-parameter"));
    ws2 = load_worksheet(kFixtures + "/worksheets/acc_reverse_row.json");
    ws2.entries[0].parameter_id = "ALC 2.1.1"; // exists, wrong function
    CHECK(has_rule(lint_worksheet(ws2, model, RuleSet{}), "parameter-not-in-function"));

    Worksheet ws3 = load_worksheet(kFixtures + "/worksheets/acc_reverse_row.json");
    ws3.entries[0].dsrs.push_back("DSR-MISSING");
    CHECK(has_rule(lint_worksheet(ws3, model, RuleSet{}), "dangling-dsr"));
}

TEST_CASE("lint violations are invariant under entry permutation") {
    const SystemModel model = load_model(kFixtures + "/model/alks.json");
    Worksheet ws = load_worksheet(kFixtures + "/worksheets/acc.json");
    ws.entries[3].dsrs.push_back("DSR-MISSING");
    ws.entries[11].causes.clear();

    const auto before = rule_multiset(lint_worksheet(ws, model, RuleSet{}));
    CHECK_FALSE(before.empty());
    std::mt19937 rng(7);
    for (int round = 0; round < 5; ++round) {
        std::shuffle(ws.entries.begin(), ws.entries.end(), rng);
        CHECK(rule_multiset(lint_worksheet(ws, model, RuleSet{})) == before);
    }
}

TEST_CASE("unknown lint rule names are rejected") {
    CHECK_THROWS_AS(RuleSet::parse({"no-such-rule"}), std::invalid_argument);
    CHECK(RuleSet::parse({}).enabled.empty());
}

TEST_CASE("worksheet JSON round trips") {
    const Worksheet ws = load_worksheet(kFixtures + "/worksheets/acc.json");
    const Worksheet again = worksheet_from_json(worksheet_to_json(ws), "round-trip");
    REQUIRE(again.entries.size() == ws.entries.size());
    REQUIRE(again.dsrs.size() == ws.dsrs.size());
    for (std::size_t i = 0; i < ws.entries.size(); ++i) {
        CHECK(again.entries[i].row_id == ws.entries[i].row_id);
        CHECK(again.entries[i].guideword == ws.entries[i].guideword);
        CHECK(again.entries[i].hazard == ws.entries[i].hazard);
        CHECK(again.entries[i].disposition == ws.entries[i].disposition);
        CHECK(again.entries[i].same_as == ws.entries[i].same_as);
        CHECK(again.entries[i].causes == ws.entries[i].causes);
    }
}
