#pragma once

#include <utility>
#include <vector>

#include "facetflow/types.hpp"

namespace facetflow {

// Nodal values on the uniform grid x_i = i*h, h = 1/(n-1), over [0,1].
// n >= 3 is enforced at the few entry points that build grids; the struct
// itself stays a plain value type.
struct GridFunction {
  Vector values;

  int n() const { return static_cast<int>(values.size()); }
  Scalar h() const { return Scalar(1) / (n() - 1); }
  Scalar x(int i) const { return i * h(); }

  static GridFunction constant(int n, Scalar v) {
    return {Vector::Constant(n, v)};
  }

  bool operator==(const GridFunction& o) const {
    return values.size() == o.values.size() &&
           (values.array() == o.values.array()).all();
  }
};

// Forward difference quotients per cell, size n-1.
Vector forward_slopes(const GridFunction& u);

// Raw second differences u_{i+1} - 2 u_i + u_{i-1}, size n-2.
Vector second_differences(const GridFunction& u);

// Discrete L2 norm sqrt(h * sum v_i^2).
Scalar l2_norm(VectorRef v, Scalar h);
Scalar l2_distance(const GridFunction& a, const GridFunction& b);
Scalar linf_distance(const GridFunction& a, const GridFunction& b);

// Total variation of the slope field: sum |s_{c+1} - s_c| over adjacent
// cells. Discrete counterpart of the curvature mass used by the decay
// diagnostics.
Scalar bv_seminorm(const GridFunction& u);

// Dirichlet boundary datum: constant, or piecewise linear in t through a
// table of (t, value) points (clamped outside the table's span).
class BoundaryEvaluator {
 public:
  static BoundaryEvaluator constant(Scalar v);
  // Requires strictly increasing times, at least one point.
  static BoundaryEvaluator table(std::vector<std::pair<Scalar, Scalar>> pts);

  Scalar value(Scalar t) const;
  // Right-sided slope of the table at t; 0 for constants and beyond the span.
  Scalar rate(Scalar t) const;
  bool is_constant() const;

  const std::vector<std::pair<Scalar, Scalar>>& points() const { return pts_; }
  bool operator==(const BoundaryEvaluator&) const = default;

 private:
  std::vector<std::pair<Scalar, Scalar>> pts_;
};

}  // namespace facetflow
