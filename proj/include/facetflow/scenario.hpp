#pragma once

#include <functional>
#include <string>
#include <vector>

#include "facetflow/grid.hpp"
#include "facetflow/monotone_graph.hpp"

namespace facetflow {

// Symbolic initial datum; materialized onto a grid on demand.
struct InitialSpec {
  enum class Kind { fourier, cosine, vee, affine, quadratic, samples };

  Kind kind{Kind::fourier};
  // fourier: sum of amp * sin(m*pi*x); cosine: amp * cos(pi*x).
  std::vector<std::pair<int, Scalar>> modes{{1, 1.0}};
  Scalar center{0.5};    // vee kink |x - center|
  Scalar a{0}, b{0};     // affine a + b*x
  Scalar scale{1};       // overall multiplier
  Vector samples;        // kind == samples: nodal values, define their own n

  bool operator==(const InitialSpec& o) const {
    return kind == o.kind && modes == o.modes && center == o.center &&
           a == o.a && b == o.b && scale == o.scale &&
           samples.size() == o.samples.size() &&
           (samples.array() == o.samples.array()).all();
  }
};

// Pointwise evaluator for every kind except samples (which interpolates).
std::function<Scalar(Scalar)> initial_evaluator(const InitialSpec& s);
GridFunction materialize(const InitialSpec& s, int n);

enum class Method { prox, regularized };

struct SolverOptions {
  Scalar tol_prox{1e-13};     // primal-equivalent stopping change per round
  int max_rounds{5000};       // per implicit step
  long substep_ceiling{4'000'000};  // explicit sub-steps per dt step
  bool operator==(const SolverOptions&) const = default;
};

std::vector<Scalar> default_epsilon_schedule();  // 0.1 * 2^-k, k = 0..5

struct Scenario {
  std::string name{"scenario"};
  MonotoneGraph graph;
  std::string graph_preset;  // echo only; empty for literal graphs
  InitialSpec initial;
  BoundaryEvaluator left{BoundaryEvaluator::constant(0)};
  BoundaryEvaluator right{BoundaryEvaluator::constant(0)};
  int n{101};
  Scalar dt{1e-4};
  Scalar T{0.1};
  Method method{Method::prox};
  std::vector<Scalar> epsilon_schedule{default_epsilon_schedule()};
  SolverOptions solver;
  int snapshot_stride{1};

  bool operator==(const Scenario&) const = default;
};

// Structural checks: n >= 3, dt/T positive, schedule positive decreasing,
// and u0 matching the Dirichlet data at both endpoints. Throws
// std::invalid_argument on the first failure.
void validate_scenario(const Scenario& s);

// FNV-1a hash of the canonical scenario echo; stable across runs.
std::string scenario_fingerprint(const Scenario& s);

}  // namespace facetflow
