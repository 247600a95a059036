#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace facetflow {

using Scalar = double;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using VectorRef = Eigen::Ref<const Vector>;

// Closed interval [lo, hi]. Degenerate (lo == hi) intervals are single values.
struct Interval {
  Scalar lo{0};
  Scalar hi{0};

  Scalar width() const { return hi - lo; }
  Scalar mid() const { return 0.5 * (lo + hi); }
  bool singleton() const { return lo == hi; }
  bool contains(Scalar x, Scalar tol = 0) const {
    return x >= lo - tol && x <= hi + tol;
  }
  // Distance from x to the interval; 0 when contained.
  Scalar distance(Scalar x) const {
    if (x < lo) return lo - x;
    if (x > hi) return x - hi;
    return 0;
  }
  Scalar clamp(Scalar x) const { return x < lo ? lo : (x > hi ? hi : x); }
};

// Raised on malformed scenario text; line is 1-based, 0 when not applicable.
struct ScenarioError : std::runtime_error {
  int line;
  ScenarioError(int line_, const std::string& what_)
      : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + what_
                                     : what_),
        line(line_) {}
};

// Raised when a time step cannot be completed (sub-step ceiling, stalled
// iteration). Carries the simulation time at which the failure occurred.
struct SolveError : std::runtime_error {
  Scalar t;
  Scalar residual;
  SolveError(Scalar t_, Scalar residual_, const std::string& what_)
      : std::runtime_error(what_), t(t_), residual(residual_) {}
};

}  // namespace facetflow
