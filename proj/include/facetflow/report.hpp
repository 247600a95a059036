#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "facetflow/facet_analysis.hpp"
#include "facetflow/oracles.hpp"
#include "facetflow/verification.hpp"

namespace facetflow {

// One row per facet per snapshot:
//   t,theta,xi_minus,xi_plus,a,b,speed_predicted,speed_measured
// speed_predicted is (b-a)/(xi_plus-xi_minus) for interior facets;
// speed_measured is the height rate against the matching facet in the
// previous snapshot (nan when no match exists yet).
void write_facet_trajectory(const TimeSeries& series, const MonotoneGraph& g,
                            std::ostream& out);

// Per-snapshot error table against an oracle; adds measured vs predicted
// facet half-widths when the oracle is a facet law and a graph is supplied.
std::string compare_with_oracle(const TimeSeries& series,
                                const OracleSolution& oracle,
                                const MonotoneGraph* facet_graph = nullptr);

// Per-snapshot difference norms between two runs plus the contraction
// margins.
std::string compare_runs(const TimeSeries& a, const TimeSeries& b);

std::string render_reports(const std::vector<InvariantReport>& reports);

}  // namespace facetflow
