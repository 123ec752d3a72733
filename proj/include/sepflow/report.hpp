#pragma once

#include <string>

#include <json.hpp>

#include "sepflow/solver.hpp"

namespace sepflow {

// Key-sorted JSON so equal reports serialize to equal bytes.  Wall-clock
// numbers live only under "timings"; determinism checks compare "result".
nlohmann::json cut_json(const Cut& cut);
nlohmann::json alpha_report_json(const AlphaReport& rep);
nlohmann::json solve_report_json(const SolveReport& rep);

std::string outcome_name(AlphaOutcome outcome);

// Thin projections of the JSON report.
std::string solve_report_text(const SolveReport& rep);
std::string solve_report_csv(const SolveReport& rep);

}  // namespace sepflow
