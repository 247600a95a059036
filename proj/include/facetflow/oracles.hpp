#pragma once

#include <functional>

#include "facetflow/scenario.hpp"
#include "facetflow/series.hpp"
#include "facetflow/solver.hpp"

namespace facetflow {

enum class OracleKind { fourier, facet_law, stationary, fine_grid };

// Reference solution with an evaluator interface. time_derivative may be an
// empty function when no sensible pointwise rate exists. accuracy is the
// bound the construction can certify (series truncation, 0 for exact laws).
struct OracleSolution {
  OracleKind kind{OracleKind::fourier};
  std::function<Scalar(Scalar x, Scalar t)> value;
  std::function<Scalar(Scalar x, Scalar t)> time_derivative;
  Interval t_domain;  // closed validity window in t
  Scalar accuracy{0};

  GridFunction sample(int n, Scalar t) const;
};

// Separated-variables solution of u_t = u_xx with constant endpoint values
// A, B: affine part plus a sine series with numerically integrated
// coefficients. Coefficients are computed up to 2*modes; the reported
// accuracy is the tail sum over modes+1..2*modes at t = 0 (it only shrinks
// for t > 0).
OracleSolution heat_fourier(const InitialSpec& u0, Scalar A, Scalar B,
                            int modes);

// Evolution of u0 = |x - center| under the sign graph with pinned endpoint
// values: the kink opens into a flat of height lambda(t) = sqrt(2t) spanning
// [center - lambda, center + lambda], so u(x,t) = max(|x - center|,
// sqrt(2t)). The law integrates the rigid-motion speed (jump width)/(facet
// width) = 2/(2 lambda) with matching facet height, and is valid until the
// facet reaches the nearer boundary.
OracleSolution tv_vee_facet(Scalar center);

Scalar tv_vee_halfwidth(Scalar t);  // sqrt(2t)

// Frozen state of the one-sided graph |p| + p: non-increasing profiles emit
// zero flux and do not move. Rejects data with any increasing segment.
OracleSolution one_sided_stationary(const InitialSpec& u0);

// Brute-force reference: rerun the scenario with n-1, dt (and any mollifier
// schedule) refined by the given factor, then interpolate back. Snapshot
// cadence is preserved so coarse-run times are matched exactly; coarse nodes
// are an exact subset of the fine grid.
OracleSolution fine_grid_reference(const Scenario& sc, int refine);

}  // namespace facetflow
