#include <doctest.h>

#include <cmath>

#include "facetflow/oracles.hpp"

using namespace facetflow;

namespace {
constexpr Scalar kPi = 3.14159265358979323846;
}

TEST_CASE("heat series: single mode decay") {
  InitialSpec u0;  // sin(pi x)
  const auto sol = heat_fourier(u0, 0, 0, 64);
  CHECK(sol.accuracy <= 1e-10);
  // e^{-pi^2/10} at the midpoint
  CHECK(sol.value(0.5, 0.1) ==
        doctest::Approx(0.37270783885343794).epsilon(1e-9));
  CHECK(sol.value(0.5, 0) == doctest::Approx(1).epsilon(1e-9));
  CHECK(sol.value(0, 0.05) == doctest::Approx(0).epsilon(1e-9));

  // t = 0 reproduces the datum everywhere
  const auto g0 = sol.sample(101, 0);
  const auto exact = materialize(u0, 101);
  CHECK(linf_distance(g0, exact) <= 1e-8);
}

TEST_CASE("heat series: two modes against the closed form") {
  InitialSpec u0;
  u0.modes = {{1, 1.0}, {2, 0.1}};
  const auto sol = heat_fourier(u0, 0, 0, 64);
  for (Scalar t : {0.0, 0.01, 0.05}) {
    for (Scalar x : {0.1, 0.25, 0.6, 0.9}) {
      const Scalar expected = std::exp(-kPi * kPi * t) * std::sin(kPi * x) +
                              0.1 * std::exp(-4 * kPi * kPi * t) *
                                  std::sin(2 * kPi * x);
      CHECK(sol.value(x, t) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("heat series: affine data stay put") {
  InitialSpec u0;
  u0.kind = InitialSpec::Kind::affine;
  u0.a = 1;
  u0.b = 2;  // u0 = 1 + 2x, endpoints 1 and 3
  const auto sol = heat_fourier(u0, 1, 3, 32);
  for (Scalar t : {0.0, 0.1, 1.0})
    for (Scalar x : {0.0, 0.3, 1.0})
      CHECK(sol.value(x, t) == doctest::Approx(1 + 2 * x).epsilon(1e-8));
}

TEST_CASE("heat series satisfies the equation") {
  InitialSpec u0;
  u0.modes = {{1, 1.0}, {3, 0.2}};
  const auto sol = heat_fourier(u0, 0, 0, 64);
  const Scalar x = 0.37, t = 0.03, d = 1e-4;
  const Scalar uxx =
      (sol.value(x + d, t) - 2 * sol.value(x, t) + sol.value(x - d, t)) /
      (d * d);
  const Scalar ut = (sol.value(x, t + d) - sol.value(x, t - d)) / (2 * d);
  CHECK(ut == doctest::Approx(uxx).epsilon(1e-4));
  CHECK(sol.time_derivative(x, t) == doctest::Approx(ut).epsilon(1e-4));
}

TEST_CASE("vee facet law: geometry at t = 0.02") {
  const auto sol = tv_vee_facet(0.5);
  CHECK(tv_vee_halfwidth(0.02) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(sol.t_domain.lo == 0);
  CHECK(sol.t_domain.hi == doctest::Approx(0.125));

  // facet covers [0.3, 0.7] at height 0.2
  CHECK(sol.value(0.5, 0.02) == doctest::Approx(0.2));
  CHECK(sol.value(0.31, 0.02) == doctest::Approx(0.2));
  CHECK(sol.value(0.69, 0.02) == doctest::Approx(0.2));
  // outside the facet the initial vee is untouched
  CHECK(sol.value(0.75, 0.02) == doctest::Approx(0.25));
  CHECK(sol.value(0.1, 0.02) == doctest::Approx(0.4));
  CHECK(sol.value(0.5, 0) == doctest::Approx(0));

  // rise speed on the facet is 1/halfwidth; zero outside
  CHECK(sol.time_derivative(0.5, 0.02) == doctest::Approx(5).epsilon(1e-12));
  CHECK(sol.time_derivative(0.9, 0.02) == 0);
}

TEST_CASE("vee facet law: mass balance of the rise") {
  // integral of u_t over the bar equals the flux drop across it, which is
  // the jump width 2 of the sign graph
  const auto sol = tv_vee_facet(0.5);
  for (Scalar t : {0.005, 0.02, 0.08}) {
    const int m = 20001;
    Scalar integral = 0;
    const Scalar dx = Scalar(1) / (m - 1);
    for (int i = 0; i < m - 1; ++i)
      integral += dx * sol.time_derivative((i + 0.5) * dx, t);
    // midpoint rule with a jump integrand: first-order in dx
    CHECK(integral == doctest::Approx(2).epsilon(1e-3));
  }
  CHECK_THROWS_AS(tv_vee_facet(0), std::invalid_argument);
}

TEST_CASE("one-sided graph: non-increasing data are frozen") {
  InitialSpec u0;
  u0.kind = InitialSpec::Kind::affine;
  u0.a = 1;
  u0.b = -1;  // 1 - x
  const auto sol = one_sided_stationary(u0);
  for (Scalar t : {0.0, 0.5, 7.0})
    for (Scalar x : {0.0, 0.4, 1.0})
      CHECK(sol.value(x, t) == doctest::Approx(1 - x).epsilon(1e-12));
  CHECK(sol.time_derivative(0.3, 1) == 0);

  InitialSpec rising;
  rising.kind = InitialSpec::Kind::affine;
  rising.a = 0;
  rising.b = 1;
  CHECK_THROWS_AS(one_sided_stationary(rising), std::invalid_argument);

  InitialSpec vee;
  vee.kind = InitialSpec::Kind::vee;  // falls then rises
  CHECK_THROWS_AS(one_sided_stationary(vee), std::invalid_argument);
}

TEST_CASE("fine-grid reference reduces to the plain run at refine 1") {
  Scenario sc;
  sc.n = 21;
  sc.dt = 1e-3;
  sc.T = 0.01;
  sc.snapshot_stride = 5;
  const auto ref = fine_grid_reference(sc, 1);
  const auto direct = run(sc);
  const auto& last = direct.series.back();
  const auto sampled = ref.sample(sc.n, last.t);
  CHECK(linf_distance(sampled, last.u) == 0);
  CHECK(ref.t_domain.hi == doctest::Approx(sc.T));
  CHECK_THROWS_AS(fine_grid_reference(sc, 0), std::invalid_argument);
}

TEST_CASE("fine-grid reference tracks the coarse run") {
  Scenario sc;
  sc.n = 21;
  sc.dt = 1e-3;
  sc.T = 0.01;
  sc.snapshot_stride = 10;
  const auto ref = fine_grid_reference(sc, 4);
  const auto direct = run(sc);
  const auto& last = direct.series.back();
  // both converge to the same heat solution; the gap is O(dt + h^2)
  CHECK(linf_distance(ref.sample(sc.n, last.t), last.u) <= 5e-3);
}
