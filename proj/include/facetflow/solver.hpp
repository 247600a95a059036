#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "facetflow/monotone_graph.hpp"
#include "facetflow/scenario.hpp"
#include "facetflow/series.hpp"

namespace facetflow {

// Interior time derivatives (L_eps(u_x))_x by flux differencing; boundary
// entries carry the prescribed endpoint rates.
Vector semi_discrete_rhs(const SmoothMonotoneFn& lg, const GridFunction& u,
                         Scalar a_rate, Scalar b_rate);

struct StepStats {
  int rounds{0};          // implicit step: sweep+block rounds used
  long substeps{0};       // explicit step: sub-steps used
  Scalar kkt_residual{0};  // implicit step: max distance of flux to L(slope)
};

// One implicit minimizing-movement step:
//
//   minimize  h/(2 dt) sum_i (u_i - u_prev_i)^2 + sum_c h W(forward slope)
//
// over interior values, endpoints pinned to the new boundary data. Solved in
// the dual flux variables: the nonsmooth term separates per cell there, so
// cyclic exact scalar maximization (one graph resolvent per cell) converges;
// tridiagonal block solves over runs of cells strictly inside one linear
// piece of the graph accelerate the long flat stretches. The optimal dual
// variables are the cell fluxes: u_i - u_prev_i = (dt/h)(flux_i - flux_{i-1})
// holds exactly, and flux_c lies in L(slope_c) at convergence.
class ProxStepper {
 public:
  ProxStepper(MonotoneGraph graph, int n, Scalar dt, SolverOptions opts = {});

  // Advances u_prev to t+dt with endpoint values a_next, b_next.
  std::pair<GridFunction, FluxField> step(const GridFunction& u_prev,
                                          Scalar a_next, Scalar b_next,
                                          StepStats* stats = nullptr);

  const Vector& flux() const { return flux_; }

 private:
  MonotoneGraph g_;
  int n_;
  Scalar h_, dt_;
  SolverOptions opts_;
  Vector flux_;   // warm start between steps
  Vector z_;      // slope candidate per cell from the last scalar update
  bool warm_{false};
};

std::pair<GridFunction, FluxField> step_prox(const MonotoneGraph& g,
                                             const GridFunction& u_prev,
                                             Scalar a_next, Scalar b_next,
                                             Scalar dt,
                                             SolverOptions opts = {});

// One explicit step of length dt for the mollified equation, internally
// subdivided to satisfy the stability limit  dt_sub <= 0.9 h^2 / (2 Dmax).
// Boundary nodes follow the Dirichlet data exactly. Throws SolveError when
// the required sub-step count exceeds opts.substep_ceiling.
GridFunction step_regularized(const SmoothMonotoneFn& lg,
                              const GridFunction& u_prev,
                              const BoundaryEvaluator& left,
                              const BoundaryEvaluator& right, Scalar t0,
                              Scalar dt, const SolverOptions& opts = {},
                              StepStats* stats = nullptr);

struct ConvergenceEntry {
  Scalar epsilon;
  Scalar l2_to_finest;  // final-time distance to the smallest-epsilon run
};

struct RunResult {
  TimeSeries series;  // prox series, or the finest-epsilon series
  std::vector<ConvergenceEntry> convergence;     // regularized runs only
  std::vector<TimeSeries> epsilon_series;        // one per schedule entry
  Scalar wall_seconds{0};
  long total_rounds{0};
  long total_substeps{0};
};

RunResult run(const Scenario& s);

// Distances of each coarser-epsilon run to the finest at the final time.
// All series must share n, dt, and snapshot times.
std::vector<ConvergenceEntry> epsilon_convergence_report(
    const std::vector<TimeSeries>& series);

// Least-squares slope of log(distance) against log(epsilon).
Scalar fit_observed_order(const std::vector<ConvergenceEntry>& report);

// Flux recovery without dual information: the antiderivative of
// (u_new - u_prev)/dt fixes the field up to one constant, which is chosen by
// projecting the first-cell admissible midpoint onto the intersection of all
// shifted admissibility intervals. An empty intersection yields the midpoint
// of the least-violating interval and sets ambiguous_constant.
FluxField flux_from_antiderivative(const MonotoneGraph& g,
                                   const GridFunction& u_new,
                                   const GridFunction& u_prev, Scalar dt);

// Diagnostics shared by both routes.
Diagnostics compute_diagnostics(const MonotoneGraph& g, const GridFunction& u,
                                const FluxField& flux);

}  // namespace facetflow
