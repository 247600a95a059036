#include "facetflow/facet_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace facetflow {

namespace {

constexpr Scalar kNaN = std::numeric_limits<Scalar>::quiet_NaN();

FacetTols resolve(const FacetTols& t, const GridFunction& u) {
  const FacetTols d = default_facet_tols(u);
  FacetTols r = t;
  if (r.flat_tol <= 0) r.flat_tol = d.flat_tol;
  if (r.slope_tol <= 0) r.slope_tol = d.slope_tol;
  if (r.conv_tol <= 0) r.conv_tol = d.conv_tol;
  return r;
}

}  // namespace

FacetTols default_facet_tols(const GridFunction& u) {
  const Vector s = forward_slopes(u);
  const Scalar scale = std::max<Scalar>(1, s.cwiseAbs().maxCoeff());
  const Scalar tol = 10 * u.h() * scale;
  return {tol, tol, tol};
}

ClarkeDerivative clarke_dx(const GridFunction& u, Scalar slope_tol) {
  const Vector s = forward_slopes(u);
  const int n = u.n();
  ClarkeDerivative d;
  d.node.resize(n);
  d.node[0] = {s[0], s[0]};
  d.node[n - 1] = {s[n - 2], s[n - 2]};
  for (int i = 1; i < n - 1; ++i) {
    const Scalar lo = std::min(s[i - 1], s[i]);
    const Scalar hi = std::max(s[i - 1], s[i]);
    if (hi - lo <= slope_tol) {
      const Scalar m = 0.5 * (lo + hi);
      d.node[i] = {m, m};
    } else {
      d.node[i] = {lo, hi};
    }
  }
  return d;
}

std::vector<FlatRun> detect_flats(const GridFunction& u, Scalar flat_tol) {
  const Vector s = forward_slopes(u);
  const int cells = static_cast<int>(s.size());
  const Scalar h = u.h();
  std::vector<FlatRun> runs;
  int c = 0;
  while (c < cells) {
    Scalar lo = s[c], hi = s[c];
    int e = c;
    while (e + 1 < cells) {
      const Scalar nlo = std::min(lo, s[e + 1]);
      const Scalar nhi = std::max(hi, s[e + 1]);
      if (nhi - nlo > flat_tol) break;
      lo = nlo;
      hi = nhi;
      ++e;
    }
    if (e > c)
      runs.push_back({0.5 * (lo + hi), c, e, {c * h, (e + 1) * h}});
    c = e + 1;
  }
  return runs;
}

namespace {

// Sub-cell endpoint from the transition-cell slope: the fraction of that
// cell already at the facet slope is (s_edge - s_far)/(theta - s_far).
// Exact when the profile is a sampled piecewise-linear function.
Scalar refine_fraction(Scalar s_edge, Scalar s_far, Scalar theta) {
  const Scalar den = theta - s_far;
  if (den == 0) return 0;
  const Scalar f = (s_edge - s_far) / den;
  return std::clamp<Scalar>(f, 0, 1);
}

}  // namespace

std::vector<FacetRecord> facet_records(const MonotoneGraph& g,
                                       const GridFunction& u,
                                       const FacetTols& tols_in) {
  const FacetTols tols = resolve(tols_in, u);
  const Vector s = forward_slopes(u);
  const int cells = static_cast<int>(s.size());
  const Scalar h = u.h();
  const std::vector<Knot> jumps = jump_points(g);
  std::vector<FacetRecord> out;
  if (jumps.empty()) return out;

  auto nearest_jump = [&](Scalar theta) -> const Knot* {
    const Knot* best = nullptr;
    Scalar bd = std::numeric_limits<Scalar>::infinity();
    for (const auto& k : jumps) {
      const Scalar d = std::abs(k.p - theta);
      if (d < bd) {
        bd = d;
        best = &k;
      }
    }
    return (best && bd <= tols.slope_tol) ? best : nullptr;
  };

  for (const FlatRun& run : detect_flats(u, tols.flat_tol)) {
    const Knot* k = nearest_jump(run.theta);
    if (!k) continue;
    FacetRecord rec;
    rec.theta = k->p;
    rec.jump = {k->y_lo, k->y_hi};
    rec.first_cell = run.first_cell;
    rec.last_cell = run.last_cell;

    const bool touch_l = run.first_cell == 0;
    const bool touch_r = run.last_cell == cells - 1;
    if (touch_l) {
      rec.xi_minus = 0;
    } else {
      const int e = run.first_cell - 1;
      const Scalar s_far = (e >= 1) ? s[e - 1] : s[e];
      const Scalar f = (e >= 1) ? refine_fraction(s[e], s_far, rec.theta) : 0;
      rec.xi_minus = run.first_cell * h - f * h;
    }
    if (touch_r) {
      rec.xi_plus = 1;
    } else {
      const int e = run.last_cell + 1;
      const Scalar s_far = (e + 1 <= cells - 1) ? s[e + 1] : s[e];
      const Scalar f =
          (e + 1 <= cells - 1) ? refine_fraction(s[e], s_far, rec.theta) : 0;
      rec.xi_plus = (run.last_cell + 1) * h + f * h;
    }

    if (touch_l && touch_r)
      rec.boundary_touch = BoundaryTouch::both;
    else if (touch_l)
      rec.boundary_touch = BoundaryTouch::left;
    else if (touch_r)
      rec.boundary_touch = BoundaryTouch::right;

    rec.speed = (rec.boundary_touch == BoundaryTouch::none)
                    ? rec.jump.width() / (rec.xi_plus - rec.xi_minus)
                    : 0;
    out.push_back(rec);
  }

  // Lone cells sitting exactly on a jump abscissa, not absorbed by any run.
  for (int c = 0; c < cells; ++c) {
    if (eval_set(g, s[c]).singleton()) continue;
    bool covered = false;
    for (const auto& rec : out)
      if (c >= rec.first_cell && c <= rec.last_cell) {
        covered = true;
        break;
      }
    if (covered) continue;
    FacetRecord rec;
    rec.theta = s[c];
    rec.jump = eval_set(g, s[c]);
    rec.xi_minus = rec.xi_plus = (c + 0.5) * h;
    rec.speed = kNaN;
    rec.isolated = true;
    rec.first_cell = rec.last_cell = c;
    out.push_back(rec);
  }

  std::sort(out.begin(), out.end(),
            [](const FacetRecord& a, const FacetRecord& b) {
              return a.xi_minus < b.xi_minus;
            });
  return out;
}

FluxField compose_bar(const MonotoneGraph& g, const GridFunction& u,
                      const FacetTols& tols_in) {
  const FacetTols tols = resolve(tols_in, u);
  const Vector s = forward_slopes(u);
  const int cells = static_cast<int>(s.size());
  const Scalar h = u.h();

  // The facet cases below assume a convex profile; without a jump abscissa
  // inside the slope range they never trigger and the plain composition is
  // shape-agnostic.
  const Scalar smin = s.minCoeff(), smax = s.maxCoeff();
  bool jump_in_range = false;
  for (const auto& k : jump_points(g))
    if (k.p >= smin - tols.slope_tol && k.p <= smax + tols.slope_tol) {
      jump_in_range = true;
      break;
    }
  if (jump_in_range) {
    // convexity up to tolerance: no slope may drop below an earlier slope
    // by more than conv_tol (raw second differences scale with h^2 and
    // would make any h-scaled tolerance vacuous)
    Scalar run_max = s[0], drawdown = 0;
    for (int c = 1; c < cells; ++c) {
      run_max = std::max(run_max, s[c - 1]);
      drawdown = std::max(drawdown, run_max - s[c]);
    }
    if (drawdown > tols.conv_tol)
      throw std::invalid_argument(
          "compose_bar: profile must be convex (within tolerance) when its "
          "slope range crosses a jump of the graph");
  }

  FluxField f;
  f.mid.resize(cells);
  std::vector<bool> pending(cells, false);
  for (int c = 0; c < cells; ++c) {
    const Interval set = eval_set(g, s[c]);
    f.mid[c] = set.mid();
    pending[c] = !set.singleton();
  }

  auto mark_isolated = [&](int c) {
    if (f.flags.empty()) f.flags.assign(cells, CellFlag::ok);
    f.flags[c] = CellFlag::isolated_jump;
  };

  for (const FacetRecord& rec : facet_records(g, u, tols)) {
    if (rec.isolated) {
      mark_isolated(rec.first_cell);
      pending[rec.first_cell] = false;
      continue;
    }
    const Scalar a = rec.jump.lo, b = rec.jump.hi;
    for (int c = rec.first_cell; c <= rec.last_cell; ++c) {
      Scalar v;
      switch (rec.boundary_touch) {
        case BoundaryTouch::left:
          v = b;
          break;
        case BoundaryTouch::right:
          v = a;
          break;
        case BoundaryTouch::both:
          v = rec.jump.mid();
          break;
        default: {
          const Scalar xm = (c + 0.5) * h;
          v = a + (b - a) * (xm - rec.xi_minus) / (rec.xi_plus - rec.xi_minus);
          v = rec.jump.clamp(v);
        }
      }
      f.mid[c] = v;
      pending[c] = false;
    }
  }

  // Exact jump hits that fell outside every record keep the midpoint value
  // but are flagged so downstream stencils can skip them.
  for (int c = 0; c < cells; ++c)
    if (pending[c]) mark_isolated(c);
  return f;
}

ResidualReport almost_classical_residual(const TimeSeries& series,
                                         const MonotoneGraph& g,
                                         Scalar res_tol,
                                         const FacetTols& tols) {
  ResidualReport report;
  const auto& snaps = series.snaps;
  for (std::size_t k = 0; k + 1 < snaps.size(); ++k) {
    const Snapshot& A = snaps[k];
    const Snapshot& B = snaps[k + 1];
    const Scalar dtp = B.t - A.t;
    if (!(dtp > 0))
      throw std::invalid_argument(
          "almost_classical_residual: snapshots must be strictly increasing "
          "in time");
    const int n = B.u.n();
    const Scalar h = B.u.h();
    const FluxField field = compose_bar(g, B.u, tols);

    ResidualSnapshot rs;
    rs.t_from = A.t;
    rs.t_to = B.t;
    rs.residual = Vector::Zero(n);
    Scalar ut_max = 0;
    for (int i = 1; i < n - 1; ++i)
      ut_max = std::max(ut_max,
                        std::abs((B.u.values[i] - A.u.values[i]) / dtp));
    rs.res_tol = res_tol > 0 ? res_tol : 1e-3 + 0.05 * ut_max;

    for (int i = 1; i < n - 1; ++i) {
      if (field.flag(i - 1) == CellFlag::isolated_jump ||
          field.flag(i) == CellFlag::isolated_jump)
        continue;
      const Scalar ut = (B.u.values[i] - A.u.values[i]) / dtp;
      const Scalar div = (field.mid[i] - field.mid[i - 1]) / h;
      rs.residual[i] = ut - div;
      report.max_abs_residual =
          std::max(report.max_abs_residual, std::abs(rs.residual[i]));
      if (std::abs(rs.residual[i]) > rs.res_tol) rs.violations.push_back(i);
    }
    rs.measure = static_cast<Scalar>(rs.violations.size()) * h;
    report.aggregate += rs.measure * dtp;
    report.snaps.push_back(std::move(rs));
  }
  return report;
}

}  // namespace facetflow
