#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hazopwb/model.hpp"
#include "hazopwb/worksheet.hpp"

namespace hazopwb {

// One point of the deviation space: apply one guideword to one parameter of
// one function, optionally under one operational mode.
struct DeviationCell {
    std::string function_id;
    std::string parameter_id;
    Guideword guideword = Guideword::NoOrNot;
    std::optional<std::string> mode;

    bool operator==(const DeviationCell&) const = default;
};

// Full cross product over the selected functions:
// |cells| = sum over functions of |parameters| x 10 x max(1, |modes|).
// Output order is (function id, parameter id, guideword declaration order,
// mode list order); ids compare lexicographically. Duplicate declarations
// are enumerated once. Throws std::invalid_argument on an unknown filter id.
// A present-but-empty capability filter selects nothing.
std::vector<DeviationCell> enumerate_cells(
    const SystemModel& model,
    const std::optional<std::vector<std::string>>& capability_filter = std::nullopt,
    const std::optional<std::vector<std::string>>& modes = std::nullopt);

struct CoverageReport {
    std::vector<DeviationCell> missing;     // cells no row addresses
    std::vector<std::string> unknown;       // row ids outside the enumeration
    std::vector<std::string> duplicates;    // row ids sharing a cell (reported, not merged)
    double covered_fraction = 1.0;          // (|cells| - |missing|) / |cells|; 1.0 when no cells
    std::size_t total_cells = 0;

    bool complete() const { return missing.empty(); }
};

// Any disposition (analysed, not_applicable, same_as) covers its cell.
CoverageReport check_coverage(const std::vector<DeviationCell>& cells,
                              const std::vector<HazopEntry>& entries);

} // namespace hazopwb
