#include "hazopwb/report.hpp"

#include <cstdio>
#include <sstream>

namespace hazopwb {

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string fmt_fraction(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string fmt_metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string disposition_text(const HazopEntry& e) {
    switch (e.disposition) {
    case Disposition::Analysed: return "analysed";
    case Disposition::NotApplicable: return "not_applicable";
    case Disposition::SameAs: return "same_as(" + e.same_as + ")";
    }
    return "?";
}

} // namespace

std::string csv_escape(const std::string& field) {
    bool needs_quote = false;
    for (char c : field) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') needs_quote = true;
    }
    if (!needs_quote) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string render_validation_text(const ValidationReport& report, const std::string& subject) {
    std::ostringstream os;
    if (report.ok()) {
        os << subject << ": ok (" << report.infos.size() << " note(s))\n";
    } else {
        os << subject << ": " << report.violations.size() << " violation(s)\n";
    }
    for (const auto& v : report.violations) {
        os << "  violation " << v.rule << " [" << v.subject_id << "] " << v.message << "\n";
    }
    for (const auto& v : report.infos) {
        os << "  note " << v.rule << " [" << v.subject_id << "] " << v.message << "\n";
    }
    return os.str();
}

std::string render_coverage_text(const CoverageReport& report) {
    std::ostringstream os;
    os << "cells: " << report.total_cells << "\n";
    os << "covered_fraction: " << fmt_fraction(report.covered_fraction) << "\n";
    os << "missing: " << report.missing.size() << "\n";
    for (const auto& cell : report.missing) {
        os << "  " << cell.function_id << " / " << cell.parameter_id << " / "
           << guideword_label(cell.guideword);
        if (cell.mode) os << " / " << *cell.mode;
        os << "\n";
    }
    os << "unknown: " << report.unknown.size() << "\n";
    for (const auto& row : report.unknown) os << "  " << row << "\n";
    os << "duplicates: " << report.duplicates.size() << "\n";
    for (const auto& row : report.duplicates) os << "  " << row << "\n";
    return os.str();
}

std::string render_outcome_text(const SimOutcome& outcome) {
    std::ostringstream os;
    os << "outcome: " << to_string(outcome.classification) << "\n";
    if (outcome.time_of_event) os << "time_of_event: " << fmt_metric(*outcome.time_of_event)
                                  << "\n";
    os << "min_gap: " << fmt_metric(outcome.min_gap) << "\n";
    os << "max_abs_lateral_offset: " << fmt_metric(outcome.max_abs_lateral_offset) << "\n";
    os << "max_abs_lateral_accel: " << fmt_metric(outcome.max_abs_lateral_accel) << "\n";
    os << "plausibility_flags: " << outcome.plausibility_flags << "\n";
    if (!outcome.trace_path.empty()) os << "trace: " << outcome.trace_path << "\n";
    return os.str();
}

std::string render_discrepancy_text(const DiscrepancyReport& report) {
    std::ostringstream os;
    os << "discrepancies: " << report.items.size() << "\n";
    for (const auto& item : report.items) {
        os << "  " << item.kind << " [" << item.row_id << "]\n";
    }
    return os.str();
}

std::string render_worksheet_csv(const Worksheet& ws) {
    std::ostringstream os;
    os << "row_id,function,parameter,guideword,mode,deviation,hazard,situation,consequences,"
          "causes,dsrs,disposition\n";
    for (const auto& e : ws.entries) {
        os << csv_escape(e.row_id) << ',' << csv_escape(e.function_id) << ','
           << csv_escape(e.parameter_id) << ',' << csv_escape(std::string(guideword_label(
                                                       e.guideword)))
           << ',' << csv_escape(e.mode.value_or("")) << ',' << csv_escape(e.deviation) << ','
           << csv_escape(e.hazard.value_or("")) << ',' << csv_escape(e.situation) << ','
           << csv_escape(e.consequences.value_or("")) << ','
           << csv_escape(join(e.causes, "; ")) << ',' << csv_escape(join(e.dsrs, "; ")) << ','
           << csv_escape(disposition_text(e)) << "\n";
    }
    return os.str();
}

std::string render_usecase_markdown(const UseCase& uc) {
    std::ostringstream os;
    os << "## Use case " << uc.id;
    if (!uc.title.empty()) os << " — " << uc.title;
    os << "\n\n";
    os << "| Element | Content |\n|---|---|\n";
    os << "| Primary environment | " << uc.primary_environment << " |\n";
    os << "| Goal in context | " << uc.goal_in_context << " |\n";
    os << "| Scope | " << uc.scope << " |\n";
    os << "| Pre-conditions | " << join(uc.pre_conditions, "; ") << " |\n";
    os << "| Success end conditions | " << join(uc.success_end_conditions, "; ") << " |\n";
    os << "| Failed end conditions | " << join(uc.failed_end_conditions, "; ") << " |\n";
    os << "| Actors | " << join(uc.actors, "; ") << " |\n";
    os << "| Trigger | " << uc.trigger << " |\n";
    os << "\n";
    os << "### Description\n\n";
    for (const auto& step : uc.description) {
        os << step.index << ". " << step.action << "\n";
    }
    if (!uc.extension.empty()) {
        os << "\n### Extension\n\n";
        for (const auto& step : uc.extension) {
            os << step.index << ". " << step.action << "\n";
        }
    }
    os << "\n";
    return os.str();
}

std::string render_worksheet_markdown(const Worksheet& ws,
                                      const std::vector<UseCase>& usecases) {
    std::ostringstream os;
    os << "# HAZOP worksheet\n\n";
    for (const auto& uc : usecases) {
        if (!ws.usecase_id || uc.id == *ws.usecase_id) os << render_usecase_markdown(uc);
    }
    os << "## Analysis\n\n";
    os << "| Row | Function | Parameter | Guideword | Mode | Deviation | Hazard | Situation | "
          "Consequences | Causes | DSRs | Disposition |\n";
    os << "|---|---|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& e : ws.entries) {
        os << "| " << e.row_id << " | " << e.function_id << " | " << e.parameter_id << " | "
           << guideword_label(e.guideword) << " | " << e.mode.value_or("") << " | "
           << e.deviation << " | " << e.hazard.value_or("") << " | " << e.situation << " | "
           << e.consequences.value_or("") << " | " << join(e.causes, "; ") << " | "
           << join(e.dsrs, "; ") << " | " << disposition_text(e) << " |\n";
    }
    if (!ws.dsrs.empty()) {
        os << "\n## Derived safety requirements\n\n";
        for (const auto& d : ws.dsrs) {
            os << "- **" << d.id << "** (" << to_string(d.kind) << "): " << d.text << "\n";
        }
    }
    return os.str();
}

std::string matrix_summary_csv(const OutcomeMatrix& matrix) {
    std::ostringstream os;
    os << "row_id,worst_classification,n_runs,n_failures\n";
    for (const auto& [row_id, summary] : matrix.rows) {
        os << csv_escape(row_id) << ',' << to_string(summary.worst) << ',' << summary.n_runs
           << ',' << summary.n_failures << "\n";
    }
    return os.str();
}

} // namespace hazopwb
