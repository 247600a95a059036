#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "facetflow/types.hpp"

namespace facetflow {

// One vertical segment of the graph: at abscissa p the graph covers
// [y_lo, y_hi]. y_lo == y_hi marks a corner (slope change without a jump).
struct Knot {
  Scalar p{0};
  Scalar y_lo{0};
  Scalar y_hi{0};

  bool operator==(const Knot&) const = default;
};

// Maximal monotone piecewise-linear graph on the real line.
//
// Representation: ordered knots plus one slope per gap (slopes.size() ==
// knots.size() + 1, first/last entries are the tail slopes). Between knot i
// and knot i+1 the graph is the segment from (p_i, y_hi_i) to
// (p_{i+1}, y_lo_{i+1}); the stored slope for that gap must match this
// interpolant. With no knots the graph is the line of slope slopes[0]
// through the anchor point.
//
// Knots and flat pieces are carried exactly, so the jump set and the flat
// set never have to be recovered by thresholding.
//
// Instances are immutable after construction and safe to share across
// threads.
class MonotoneGraph {
 public:
  // Identity graph (slope 1 through the origin).
  MonotoneGraph();

  // Validates: knot ordering, y_lo <= y_hi, nonnegative slopes, interpolant
  // consistency across gaps. Throws std::invalid_argument naming the first
  // violated invariant.
  MonotoneGraph(std::vector<Knot> knots, std::vector<Scalar> slopes,
                std::pair<Scalar, Scalar> anchor = {0, 0});

  // Interior slopes are derived from the gap interpolants; only the two tail
  // slopes are free. Requires at least one knot.
  static MonotoneGraph from_knots(std::vector<Knot> knots, Scalar tail_lo,
                                  Scalar tail_hi);

  static MonotoneGraph affine(Scalar slope, Scalar p0 = 0, Scalar y0 = 0);

  // Named presets.
  static MonotoneGraph identity();        // L(p) = p
  static MonotoneGraph sign();            // L(p) = sgn(p), jump [-1,1] at 0
  static MonotoneGraph one_sided();       // L(p) = |p| + p
  static MonotoneGraph tv_plus_linear();  // L(p) = p + sgn(p)
  static MonotoneGraph preset(std::string_view name);

  const std::vector<Knot>& knots() const { return knots_; }
  const std::vector<Scalar>& slopes() const { return slopes_; }
  Scalar anchor_p() const { return anchor_p_; }
  Scalar anchor_y() const { return anchor_y_; }

  bool operator==(const MonotoneGraph&) const = default;

 private:
  std::vector<Knot> knots_;
  std::vector<Scalar> slopes_;
  Scalar anchor_p_{0};
  Scalar anchor_y_{0};
};

// Value set L(p). A single value off knots, [y_lo, y_hi] exactly at a knot
// (abscissae compare exactly; no tolerance is applied).
Interval eval_set(const MonotoneGraph& g, Scalar p);

// Value hull with abscissa slack: eval_set(p) widened by the range of every
// knot within tol of p. Use where p carries round-off and the exact set
// would snap to a single branch.
Interval eval_set_near(const MonotoneGraph& g, Scalar p, Scalar tol);

// Distance from the point (p, y) to the graph in the max metric, taking the
// smaller of the vertical gap at p and the best knot-segment gap. Continuous
// in p, unlike the vertical gap alone, which jumps at knot abscissae; this
// is the right residual for certifying y in L(p) numerically.
Scalar inclusion_gap(const MonotoneGraph& g, Scalar p, Scalar y);

// Knots with y_lo < y_hi, in increasing abscissa order.
std::vector<Knot> jump_points(const MonotoneGraph& g);

// Convex primitive W(p) = integral of the single-valued selection from 0 to
// p, normalized so W(0) = 0. The value chosen at jump abscissae is
// irrelevant (measure zero).
Scalar primitive(const MonotoneGraph& g, Scalar p);

// Unique x with x + tau * L(x) containing q (tau > 0). Jumps absorb a whole
// interval of q into a single x; flats forward q linearly.
Scalar resolvent(const MonotoneGraph& g, Scalar tau, Scalar q);

// Max over grid points p, offsets d in {+h,-h}, and selections l in
// eval_set(g,p) of  l*d - (W(p+d) - W(p)).  Nonpositive (up to round-off)
// iff the graph is the subdifferential of its primitive on the grid.
Scalar check_subdifferential(const MonotoneGraph& g, VectorRef p_grid, Scalar h);

// C^1 strictly increasing regularization  L_eps(p) = (L * pi_eps)(p) + eps*p
// where pi_eps is the quadratic B-spline bump of support [-eps, eps] and
// unit mass. The convolution is evaluated exactly: the integrand is
// piecewise cubic between kernel/knot breakpoints and integrated with
// two-point Gauss nodes per piece.
class SmoothMonotoneFn {
 public:
  SmoothMonotoneFn(MonotoneGraph base, Scalar epsilon);

  Scalar operator()(Scalar p) const;

  // d/dp of the regularized function; >= epsilon everywhere.
  Scalar derivative(Scalar p) const;

  // Upper bound for the derivative over [lo, hi]; used for explicit-step
  // stability limits. Cheap and safe, not tight.
  Scalar derivative_bound(Scalar lo, Scalar hi) const;

  const MonotoneGraph& base() const { return base_; }
  Scalar epsilon() const { return eps_; }
  Scalar kernel_halfwidth() const { return eps_; }

 private:
  MonotoneGraph base_;
  Scalar eps_;
  Scalar w_;  // B-spline scale: support [-3w/2, 3w/2] = [-eps, eps]
};

// Throws std::invalid_argument when epsilon <= 0.
SmoothMonotoneFn mollify(const MonotoneGraph& g, Scalar epsilon);

}  // namespace facetflow
