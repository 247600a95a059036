#include "facetflow/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace facetflow {

namespace {

constexpr Scalar kPi = 3.14159265358979323846;

Scalar simpson(const std::function<Scalar(Scalar)>& f, Scalar a, Scalar b,
               int panels) {
  // panels must be even and >= 2
  const Scalar h = (b - a) / panels;
  Scalar s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

// Interior smoothness breakpoints of the initial profile, so each Simpson
// segment integrates a smooth function.
std::vector<Scalar> initial_breakpoints(const InitialSpec& u0) {
  std::vector<Scalar> pts{0, 1};
  if (u0.kind == InitialSpec::Kind::vee) {
    if (u0.center > 0 && u0.center < 1) pts.push_back(u0.center);
  } else if (u0.kind == InitialSpec::Kind::samples) {
    const int m = static_cast<int>(u0.samples.size());
    for (int i = 1; i + 1 < m; ++i)
      pts.push_back(static_cast<Scalar>(i) / (m - 1));
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

GridFunction OracleSolution::sample(int n, Scalar t) const {
  GridFunction u;
  u.values.resize(n);
  const Scalar h = Scalar(1) / (n - 1);
  for (int i = 0; i < n; ++i) u.values[i] = value(i * h, t);
  return u;
}

OracleSolution heat_fourier(const InitialSpec& u0, Scalar A, Scalar B,
                            int modes) {
  if (modes < 1) throw std::invalid_argument("heat_fourier: need modes >= 1");
  const auto f0 = initial_evaluator(u0);
  const auto breaks = initial_breakpoints(u0);
  const int extended = 2 * modes;

  std::vector<Scalar> coeff(extended);
  for (int m = 1; m <= extended; ++m) {
    auto integrand = [&, m](Scalar x) {
      const Scalar affine = A + (B - A) * x;
      return (f0(x) - affine) * std::sin(m * kPi * x);
    };
    Scalar integral = 0;
    for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
      const Scalar a = breaks[j], b = breaks[j + 1];
      // ~16 points per oscillation, capped for short segments
      int panels = static_cast<int>(std::ceil((b - a) * std::max(4096, 8 * m)));
      panels = std::max(panels, 16);
      if (panels % 2) ++panels;
      integral += simpson(integrand, a, b, panels);
    }
    coeff[m - 1] = 2 * integral;
  }

  Scalar tail = 0;
  for (int m = modes + 1; m <= extended; ++m) tail += std::abs(coeff[m - 1]);

  auto series = std::make_shared<std::vector<Scalar>>(coeff.begin(),
                                                      coeff.begin() + modes);
  OracleSolution sol;
  sol.kind = OracleKind::fourier;
  sol.accuracy = tail;
  sol.t_domain = {0, std::numeric_limits<Scalar>::infinity()};
  sol.value = [series, A, B](Scalar x, Scalar t) {
    Scalar u = A + (B - A) * x;
    for (std::size_t m = 1; m <= series->size(); ++m)
      u += (*series)[m - 1] * std::exp(-(m * kPi) * (m * kPi) * t) *
           std::sin(m * kPi * x);
    return u;
  };
  sol.time_derivative = [series](Scalar x, Scalar t) {
    Scalar ut = 0;
    for (std::size_t m = 1; m <= series->size(); ++m) {
      const Scalar rate = (m * kPi) * (m * kPi);
      ut -= (*series)[m - 1] * rate * std::exp(-rate * t) *
            std::sin(m * kPi * x);
    }
    return ut;
  };
  return sol;
}

Scalar tv_vee_halfwidth(Scalar t) { return std::sqrt(2 * t); }

OracleSolution tv_vee_facet(Scalar center) {
  if (!(center > 0 && center < 1))
    throw std::invalid_argument("tv_vee_facet: center must lie in (0,1)");
  const Scalar reach = std::min(center, 1 - center);
  OracleSolution sol;
  sol.kind = OracleKind::facet_law;
  sol.accuracy = 0;
  sol.t_domain = {0, 0.5 * reach * reach};
  sol.value = [center](Scalar x, Scalar t) {
    return std::max(std::abs(x - center), tv_vee_halfwidth(t));
  };
  sol.time_derivative = [center](Scalar x, Scalar t) {
    if (t <= 0) return Scalar(0);
    const Scalar lambda = tv_vee_halfwidth(t);
    return std::abs(x - center) < lambda ? 1 / lambda : 0;
  };
  return sol;
}

OracleSolution one_sided_stationary(const InitialSpec& u0) {
  const auto f0 = initial_evaluator(u0);
  const int samples = 4097;
  Scalar scale = 1;
  for (int i = 0; i < samples; ++i)
    scale = std::max(scale, std::abs(f0(static_cast<Scalar>(i) / (samples - 1))));
  for (int i = 0; i + 1 < samples; ++i) {
    const Scalar a = f0(static_cast<Scalar>(i) / (samples - 1));
    const Scalar b = f0(static_cast<Scalar>(i + 1) / (samples - 1));
    if (b > a + 1e-12 * scale)
      throw std::invalid_argument(
          "one_sided_stationary: profile must be non-increasing");
  }
  OracleSolution sol;
  sol.kind = OracleKind::stationary;
  sol.accuracy = 0;
  sol.t_domain = {0, std::numeric_limits<Scalar>::infinity()};
  sol.value = [f0](Scalar x, Scalar) { return f0(x); };
  sol.time_derivative = [](Scalar, Scalar) { return Scalar(0); };
  return sol;
}

OracleSolution fine_grid_reference(const Scenario& sc, int refine) {
  if (refine < 1)
    throw std::invalid_argument("fine_grid_reference: need refine >= 1");
  Scenario fine = sc;
  fine.n = refine * (sc.n - 1) + 1;
  fine.dt = sc.dt / refine;
  fine.snapshot_stride = sc.snapshot_stride * refine;
  for (Scalar& e : fine.epsilon_schedule) e /= refine;

  auto series = std::make_shared<TimeSeries>(run(fine).series);
  const int n = fine.n;
  const Scalar h = Scalar(1) / (n - 1);

  auto eval_snapshot = [n, h](const Snapshot& s, Scalar x) {
    const Scalar pos = std::clamp<Scalar>(x, 0, 1) / h;
    int j = std::min(static_cast<int>(pos), n - 2);
    Scalar w = pos - j;
    // coarse nodes are fine nodes; land on them exactly instead of leaking
    // an ulp of the neighbor through the interpolation weights
    if (w < 1e-9) {
      w = 0;
    } else if (w > 1 - 1e-9) {
      w = 0;
      j = std::min(j + 1, n - 1);
    }
    return w == 0 ? s.u.values[j]
                  : (1 - w) * s.u.values[j] + w * s.u.values[j + 1];
  };
  auto bracket = [series](Scalar t) {
    const auto& snaps = series->snaps;
    std::size_t k = 0;
    while (k + 2 < snaps.size() && snaps[k + 1].t <= t) ++k;
    return k;
  };

  OracleSolution sol;
  sol.kind = OracleKind::fine_grid;
  sol.accuracy = 0;
  sol.t_domain = {0, series->back().t};
  sol.value = [series, eval_snapshot, bracket](Scalar x, Scalar t) {
    const auto& snaps = series->snaps;
    if (snaps.size() == 1) return eval_snapshot(snaps.front(), x);
    const std::size_t k = bracket(t);
    const Snapshot& A = snaps[k];
    const Snapshot& B = snaps[k + 1];
    Scalar w = std::clamp<Scalar>((t - A.t) / (B.t - A.t), 0, 1);
    if (w < 1e-9) w = 0;
    if (w > 1 - 1e-9) w = 1;
    if (w == 0) return eval_snapshot(A, x);
    if (w == 1) return eval_snapshot(B, x);
    return (1 - w) * eval_snapshot(A, x) + w * eval_snapshot(B, x);
  };
  sol.time_derivative = [series, eval_snapshot, bracket](Scalar x, Scalar t) {
    const auto& snaps = series->snaps;
    if (snaps.size() == 1) return Scalar(0);
    const std::size_t k = bracket(t);
    const Snapshot& A = snaps[k];
    const Snapshot& B = snaps[k + 1];
    return (eval_snapshot(B, x) - eval_snapshot(A, x)) / (B.t - A.t);
  };
  return sol;
}

}  // namespace facetflow
