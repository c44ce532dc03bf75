#pragma once

#include <string>
#include <vector>

#include "hazopwb/campaign.hpp"
#include "hazopwb/coverage.hpp"
#include "hazopwb/scenario.hpp"
#include "hazopwb/validation.hpp"
#include "hazopwb/worksheet.hpp"

namespace hazopwb {

// All renders are deterministic byte streams for identical inputs; text
// output uses LF endings.

std::string render_validation_text(const ValidationReport& report, const std::string& subject);
std::string render_coverage_text(const CoverageReport& report);
std::string render_outcome_text(const SimOutcome& outcome);
std::string render_discrepancy_text(const DiscrepancyReport& report);

// CSV columns, exactly:
// row_id,function,parameter,guideword,mode,deviation,hazard,situation,
// consequences,causes,dsrs,disposition
std::string render_worksheet_csv(const Worksheet& ws);

// Markdown: one sheet per use case (elements in template order), then the
// analysis table and the DSR list.
std::string render_worksheet_markdown(const Worksheet& ws, const std::vector<UseCase>& usecases);
std::string render_usecase_markdown(const UseCase& uc);

// row_id,worst_classification,n_runs,n_failures
std::string matrix_summary_csv(const OutcomeMatrix& matrix);

std::string csv_escape(const std::string& field);

} // namespace hazopwb
