#pragma once

#include <vector>

#include "facetflow/monotone_graph.hpp"
#include "facetflow/series.hpp"

namespace facetflow {

// Set-valued spatial derivative per node: the interval spanned by the two
// one-sided difference quotients. Boundary nodes carry their single adjacent
// slope; interior nodes collapse to a singleton when the sides agree within
// slope_tol.
struct ClarkeDerivative {
  std::vector<Interval> node;  // size n
};

ClarkeDerivative clarke_dx(const GridFunction& u, Scalar slope_tol);

// Maximal run of >= 2 consecutive cells whose slopes fit in a window of
// width flat_tol; theta is the window midpoint, span the raw node interval
// [x_{first}, x_{last+1}].
struct FlatRun {
  Scalar theta{0};
  int first_cell{0};
  int last_cell{0};  // inclusive
  Interval span;
};

std::vector<FlatRun> detect_flats(const GridFunction& u, Scalar flat_tol);

enum class BoundaryTouch { none, left, right, both };

// A flat of the profile whose slope sits on a jump abscissa of the graph.
// Endpoints are refined to sub-cell accuracy from the transition-cell
// slopes; for an exactly sampled piecewise-linear profile the refinement is
// exact. speed * (xi_plus - xi_minus) = jump.width() for interior facets.
struct FacetRecord {
  Scalar theta{0};
  Scalar xi_minus{0};
  Scalar xi_plus{0};
  Interval jump;  // [a, b] = L(theta)
  Scalar speed{0};
  BoundaryTouch boundary_touch{BoundaryTouch::none};
  bool isolated{false};  // single cell on a jump abscissa; speed is NaN
  int first_cell{0};
  int last_cell{0};
};

// Detection and convexity tolerances, all in slope units: flat_tol bounds
// the slope spread inside one flat run, slope_tol the distance from a run's
// slope to a jump abscissa, conv_tol the largest tolerated slope drawdown
// (drop below any earlier slope) before a profile stops counting as convex.
// The zero-initialized struct asks for the grid-scaled defaults
// 10 * h * max(1, max |slope|).
struct FacetTols {
  Scalar flat_tol{0};
  Scalar slope_tol{0};
  Scalar conv_tol{0};
};

FacetTols default_facet_tols(const GridFunction& u);

std::vector<FacetRecord> facet_records(const MonotoneGraph& g,
                                       const GridFunction& u,
                                       const FacetTols& tols = {});

// Midpoint flux field of the facet-aware composition of the graph with the
// slope profile:
//   - plain composition where the slope misses every jump abscissa,
//   - linear ramp from jump.lo at xi_minus to jump.hi at xi_plus across an
//     interior facet (values clamped into the jump),
//   - constant jump.hi over a facet touching the left boundary, constant
//     jump.lo over one touching the right, the jump midpoint when the facet
//     fills the whole interval,
//   - jump midpoint with an isolated_jump flag on a lone cell whose slope
//     sits exactly on a jump abscissa.
// The profile must be convex within tols.conv_tol whenever some jump
// abscissa lies in its slope range; away from every jump the composition is
// single-valued and no shape restriction applies.
FluxField compose_bar(const MonotoneGraph& g, const GridFunction& u,
                      const FacetTols& tols = {});

// Mismatch between the discrete time derivative of consecutive snapshots and
// the divergence of the facet-aware flux of the later one.
struct ResidualSnapshot {
  Scalar t_from{0};
  Scalar t_to{0};
  Vector residual;              // size n, zero at the boundary nodes
  std::vector<int> violations;  // interior nodes with |residual| > res_tol
  Scalar res_tol{0};            // threshold actually used
  Scalar measure{0};            // violation count * h
};

struct ResidualReport {
  std::vector<ResidualSnapshot> snaps;  // one per consecutive pair
  Scalar aggregate{0};                  // sum of measure * (t_to - t_from)
  Scalar max_abs_residual{0};
};

// res_tol <= 0 selects the adaptive threshold
// 1e-3 + 0.05 * max |discrete u_t| per snapshot pair. Nodes adjacent to an
// isolated-jump cell are excluded from the stencil.
ResidualReport almost_classical_residual(const TimeSeries& series,
                                         const MonotoneGraph& g,
                                         Scalar res_tol = 0,
                                         const FacetTols& tols = {});

}  // namespace facetflow
