#pragma once

#include <string>
#include <vector>

namespace hazopwb {

// A single broken rule. `rule` is a stable machine-readable name
// (e.g. "L1-dual-control"), `subject_id` the offending element.
struct Violation {
    std::string rule;
    std::string subject_id;
    std::string message;

    bool operator==(const Violation&) const = default;
};

// Violations are data, not failures: an empty `violations` list means the
// input satisfies every structural rule. `infos` carries advisory notes
// (e.g. a capability shared between services) that do not fail validation.
struct ValidationReport {
    std::vector<Violation> violations;
    std::vector<Violation> infos;

    bool ok() const { return violations.empty(); }

    void add(std::string rule, std::string subject, std::string message) {
        violations.push_back({std::move(rule), std::move(subject), std::move(message)});
    }
    void note(std::string rule, std::string subject, std::string message) {
        infos.push_back({std::move(rule), std::move(subject), std::move(message)});
    }
    void merge(const ValidationReport& other) {
        violations.insert(violations.end(), other.violations.begin(), other.violations.end());
        infos.insert(infos.end(), other.infos.begin(), other.infos.end());
    }
};

} // namespace hazopwb
