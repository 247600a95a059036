#pragma once

#include <string>

#include "facetflow/scenario.hpp"

namespace facetflow {

// Scenario text format: '#' comments, [section] headers, key = value lines.
// Sections: scenario (optional), graph, initial, boundary, discretization,
// solver (optional). See README for the full schema. Errors carry 1-based
// line numbers.
Scenario parse_scenario(const std::string& text);

// Canonical echo with defaults expanded; floats printed with 17 significant
// digits so parse(emit(s)) == s field for field.
std::string emit_scenario(const Scenario& s);

Scenario load_scenario_file(const std::string& path);

}  // namespace facetflow
