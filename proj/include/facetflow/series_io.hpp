#pragma once

#include <iosfwd>
#include <string>

#include "facetflow/scenario.hpp"
#include "facetflow/series.hpp"
#include "facetflow/solver.hpp"

namespace facetflow {

// Columnar text stream: '#'-prefixed key=value header, one column-name line,
// then one row per node per snapshot with columns t,x,u,omega_mid,slope,
// cell_flag. Cell columns repeat the last cell on the final node row so every
// field stays populated. Numbers use max-precision %.*g and round-trip
// exactly.
void emit_series(const TimeSeries& series, std::ostream& out);

// Inverse of emit_series. Malformed or truncated input raises
// std::runtime_error naming the byte offset; a missing or unknown format tag
// is a version mismatch error. Diagnostics are not stored in the stream;
// load_archive recomputes them from the scenario graph.
TimeSeries load_series(std::istream& in);
TimeSeries load_series_file(const std::string& path);

// On-disk run bundle:
//   <dir>/scenario.resolved.scn   fully expanded scenario echo
//   <dir>/series.csv              main series (finest mollifier run when the
//                                 explicit route swept several)
//   <dir>/series_eps<k>.csv       per-schedule-entry series, explicit route
//   <dir>/summary.txt             human-readable digest (only file with a
//                                 timestamp)
struct RunArchive {
  Scenario scenario;
  TimeSeries series;
};

void save_archive(const std::string& dir, const Scenario& sc,
                  const RunResult& result);
RunArchive load_archive(const std::string& dir);

}  // namespace facetflow
