#pragma once

#include <string>
#include <vector>

#include "facetflow/monotone_graph.hpp"
#include "facetflow/series.hpp"

namespace facetflow {

enum class InvariantStatus {
  pass,
  fail,
  hypothesis_violation,  // preconditions of the property do not hold; no
                         // assertion is made
};

// Outcome of one monotonicity/bound check over a time series. margins are
// signed slack values (>= 0 means the property holds at that sample); the
// report passes iff worst_margin >= -tolerance.
struct InvariantReport {
  std::string invariant;
  std::vector<Scalar> values;   // raw tracked quantity per snapshot
  std::vector<Scalar> margins;  // per comparison point
  Scalar worst_margin{0};
  Scalar tolerance{0};
  InvariantStatus status{InvariantStatus::pass};
  std::string fingerprint;
  std::string note;

  bool passed() const { return status == InvariantStatus::pass; }
};

// tolerance <= 0 selects the route default: 1e-8 for the implicit route,
// 1e-4 for the explicit mollified route.
Scalar default_invariant_tol(const TimeSeries& series);

// Slope total variation non-increasing in time.
InvariantReport check_bv_monotone(const TimeSeries& series,
                                  Scalar tolerance = 0);

// Discrete L2 distance between two runs non-increasing in time. Requires
// matching grids and snapshot times.
InvariantReport check_l2_contraction(const TimeSeries& a, const TimeSeries& b,
                                     Scalar tolerance = 0);

// Minimum raw second difference stays >= -tolerance at every snapshot.
// Requires convex initial data and constant endpoint values; otherwise the
// report carries hypothesis_violation and asserts nothing.
InvariantReport check_convexity(const TimeSeries& series,
                                Scalar tolerance = 0);

// Energy sum_c h * W(slope_c) non-increasing in time; requires constant
// endpoint values.
InvariantReport check_energy_dissipation(const TimeSeries& series,
                                         const MonotoneGraph& g,
                                         Scalar tolerance = 0);

// Flux values stay within sup |L| over [-1 - s0, 1 + s0], where s0 is the
// largest initial slope magnitude of the series.
InvariantReport check_flux_bound(const TimeSeries& series,
                                 const MonotoneGraph& g,
                                 Scalar tolerance = 0);

// The single-series suite (bv, convexity, energy, flux).
std::vector<InvariantReport> check_all(const TimeSeries& series,
                                       const MonotoneGraph& g,
                                       Scalar tolerance = 0);

}  // namespace facetflow
