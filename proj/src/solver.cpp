#include "facetflow/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace facetflow {

Vector semi_discrete_rhs(const SmoothMonotoneFn& lg, const GridFunction& u,
                         Scalar a_rate, Scalar b_rate) {
  const int n = u.n();
  if (n < 3) throw std::invalid_argument("semi_discrete_rhs: need n >= 3");
  const Scalar h = u.h();
  const Vector s = forward_slopes(u);
  Vector g(n - 1);
  for (int c = 0; c < n - 1; ++c) g[c] = lg(s[c]);
  Vector rhs(n);
  rhs[0] = a_rate;
  rhs[n - 1] = b_rate;
  for (int i = 1; i < n - 1; ++i) rhs[i] = (g[i] - g[i - 1]) / h;
  return rhs;
}

// ---- implicit minimizing-movement step (dual flux coordinates) ----

namespace {

constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();

// Affine data of W*' on the piece of the graph that the slope candidate z
// sits on, plus the closed flux range of that piece. Flat pieces of L pin
// the flux to the piece level.
struct DualPiece {
  bool pinned{false};
  Scalar icpt{0};       // W*'(l) = icpt + slope_inv * l on free pieces
  Scalar slope_inv{0};  // 1/s on sloped pieces, 0 inside a jump
  Scalar flo{-kInf};
  Scalar fhi{kInf};
};

DualPiece sloped_piece(const MonotoneGraph& g, std::size_t idx) {
  // Piece idx lives between knot idx-1 and knot idx (tails at the ends).
  const auto& ks = g.knots();
  const Scalar s = g.slopes()[idx];
  DualPiece d;
  d.flo = (idx == 0) ? -kInf : ks[idx - 1].y_hi;
  d.fhi = (idx == ks.size()) ? kInf : ks[idx].y_lo;
  if (s == 0) {
    d.pinned = true;
    d.icpt = d.flo > -kInf ? d.flo : d.fhi;  // the level; both ends coincide
    return d;
  }
  Scalar pa, ya;
  if (ks.empty()) {
    pa = g.anchor_p();
    ya = g.anchor_y();
  } else if (idx == 0) {
    pa = ks[0].p;
    ya = ks[0].y_lo;
  } else {
    pa = ks[idx - 1].p;
    ya = ks[idx - 1].y_hi;
  }
  d.slope_inv = 1 / s;
  d.icpt = pa - ya / s;
  return d;
}

DualPiece classify(const MonotoneGraph& g, Scalar z) {
  const auto& ks = g.knots();
  const std::size_t idx =
      std::lower_bound(ks.begin(), ks.end(), z,
                       [](const Knot& k, Scalar x) { return k.p < x; }) -
      ks.begin();
  if (idx < ks.size() && ks[idx].p == z) {
    const Knot& k = ks[idx];
    if (k.y_hi > k.y_lo) {
      // Inside the jump: W*' is constant = the abscissa.
      DualPiece d;
      d.icpt = k.p;
      d.flo = k.y_lo;
      d.fhi = k.y_hi;
      return d;
    }
    return sloped_piece(g, idx + 1);  // corner: right-side piece
  }
  return sloped_piece(g, idx);
}

void thomas_solve(std::vector<Scalar>& diag, std::vector<Scalar>& rhs,
                  Scalar off) {
  // Symmetric tridiagonal with constant off-diagonal; overwrite rhs with the
  // solution.
  const std::size_t m = diag.size();
  for (std::size_t i = 1; i < m; ++i) {
    const Scalar w = off / diag[i - 1];
    diag[i] -= w * off;
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[m - 1] /= diag[m - 1];
  for (std::size_t i = m - 1; i-- > 0;)
    rhs[i] = (rhs[i] - off * rhs[i + 1]) / diag[i];
}

}  // namespace

ProxStepper::ProxStepper(MonotoneGraph graph, int n, Scalar dt,
                         SolverOptions opts)
    : g_(std::move(graph)), n_(n), h_(Scalar(1) / (n - 1)), dt_(dt),
      opts_(opts), flux_(n - 1), z_(n - 1) {
  if (n < 3) throw std::invalid_argument("ProxStepper: need n >= 3");
  if (!(dt > 0)) throw std::invalid_argument("ProxStepper: need dt > 0");
}

std::pair<GridFunction, FluxField> ProxStepper::step(const GridFunction& u_prev,
                                                     Scalar a_next,
                                                     Scalar b_next,
                                                     StepStats* stats) {
  const int n = n_;
  const int cells = n - 1;
  const Scalar h = h_, dt = dt_;
  const Scalar coup = dt / h;

  // Anchor profile: previous interior values with the new endpoint data.
  Vector w = u_prev.values;
  w[0] = a_next;
  w[n - 1] = b_next;
  Vector kappa(cells);
  for (int c = 0; c < cells; ++c) kappa[c] = w[c + 1] - w[c];

  if (!warm_) {
    const Vector s0 = forward_slopes(u_prev);
    for (int c = 0; c < cells; ++c) {
      flux_[c] = eval_set(g_, s0[c]).mid();
      z_[c] = s0[c];
    }
    warm_ = true;
  }

  auto scalar_update = [&](int c) -> Scalar {
    const int nu = (c >= 1 ? 1 : 0) + (c <= cells - 2 ? 1 : 0);
    const Scalar alpha = nu * coup;
    Scalar r = kappa[c];
    if (c >= 1) r += coup * flux_[c - 1];
    if (c <= cells - 2) r += coup * flux_[c + 1];
    const Scalar z = resolvent(g_, alpha / h, r / h);
    const Scalar lnew = (r - h * z) / alpha;
    const Scalar change = std::abs(lnew - flux_[c]);
    flux_[c] = lnew;
    z_[c] = z;
    return change;
  };

  int round = 0;
  Scalar change = kInf;
  for (round = 1; round <= opts_.max_rounds; ++round) {
    Scalar max_dl = 0;
    for (int c = 0; c < cells; ++c) max_dl = std::max(max_dl, scalar_update(c));

    // Block acceleration: exact tridiagonal maximization over maximal runs of
    // cells that sit strictly inside one linear piece, with a clamped line
    // step toward the block optimum.
    thread_local std::vector<DualPiece> piece;
    piece.resize(cells);
    for (int c = 0; c < cells; ++c) piece[c] = classify(g_, z_[c]);

    int c = 0;
    while (c < cells) {
      if (piece[c].pinned) {
        ++c;
        continue;
      }
      int cb = c, ce = c;
      while (ce + 1 < cells && !piece[ce + 1].pinned) ++ce;
      c = ce + 1;
      if (ce == cb) continue;

      // Whole-array runs of pure jump pieces leave the additive flux
      // constant free; pin the first cell to keep the system nonsingular.
      if (cb == 0 && ce == cells - 1) {
        bool all_jump = true;
        for (int k = cb; k <= ce; ++k)
          if (piece[k].slope_inv != 0) {
            all_jump = false;
            break;
          }
        if (all_jump) {
          ++cb;
          if (cb > ce) continue;
        }
      }

      const std::size_t m = ce - cb + 1;
      thread_local std::vector<Scalar> diag, rhs;
      diag.resize(m);
      rhs.resize(m);
      for (int k = cb; k <= ce; ++k) {
        const int nu = (k >= 1 ? 1 : 0) + (k <= cells - 2 ? 1 : 0);
        diag[k - cb] = nu * coup + h * piece[k].slope_inv;
        Scalar r = kappa[k] - h * piece[k].icpt;
        if (k >= 1 && k - 1 < cb) r += coup * flux_[k - 1];
        if (k <= cells - 2 && k + 1 > ce) r += coup * flux_[k + 1];
        rhs[k - cb] = r;
      }
      thomas_solve(diag, rhs, -coup);

      Scalar tmax = 1;
      for (int k = cb; k <= ce; ++k) {
        const Scalar d = rhs[k - cb] - flux_[k];
        if (d > 0 && flux_[k] + d > piece[k].fhi)
          tmax = std::min(tmax, (piece[k].fhi - flux_[k]) / d);
        else if (d < 0 && flux_[k] + d < piece[k].flo)
          tmax = std::min(tmax, (piece[k].flo - flux_[k]) / d);
      }
      tmax = std::max<Scalar>(tmax, 0);
      if (tmax > 0) {
        for (int k = cb; k <= ce; ++k) {
          const Scalar d = rhs[k - cb] - flux_[k];
          flux_[k] += tmax * d;
          max_dl = std::max(max_dl, std::abs(tmax * d));
        }
      }
    }

    change = 2 * coup * max_dl;  // primal-equivalent movement
    if (change <= opts_.tol_prox) break;
  }
  if (change > opts_.tol_prox)
    throw SolveError(0, change,
                     "implicit step: coordinate iteration did not reach "
                     "tolerance within max_rounds");

  GridFunction u{w};
  for (int i = 1; i < n - 1; ++i)
    u.values[i] = u_prev.values[i] + coup * (flux_[i] - flux_[i - 1]);

  FluxField field;
  field.mid = flux_;

  if (stats) {
    stats->rounds = round;
    // the vertical gap is discontinuous at jump abscissae and an ulp of
    // slope noise would blow it up; certify against the graph as a set
    const Vector s = forward_slopes(u);
    Scalar kkt = 0;
    for (int c = 0; c < cells; ++c)
      kkt = std::max(kkt, inclusion_gap(g_, s[c], flux_[c]));
    stats->kkt_residual = kkt;
  }
  return {std::move(u), std::move(field)};
}

std::pair<GridFunction, FluxField> step_prox(const MonotoneGraph& g,
                                             const GridFunction& u_prev,
                                             Scalar a_next, Scalar b_next,
                                             Scalar dt, SolverOptions opts) {
  ProxStepper stepper(g, u_prev.n(), dt, opts);
  return stepper.step(u_prev, a_next, b_next);
}

// ---- explicit mollified route ----

GridFunction step_regularized(const SmoothMonotoneFn& lg,
                              const GridFunction& u_prev,
                              const BoundaryEvaluator& left,
                              const BoundaryEvaluator& right, Scalar t0,
                              Scalar dt, const SolverOptions& opts,
                              StepStats* stats) {
  const int n = u_prev.n();
  if (n < 3) throw std::invalid_argument("step_regularized: need n >= 3");
  const Scalar h = u_prev.h();
  GridFunction u = u_prev;
  Vector g(n - 1);
  Scalar remaining = dt;
  long count = 0;
  while (remaining > 0) {
    const Vector s = forward_slopes(u);
    const Scalar dmax = lg.derivative_bound(s.minCoeff(), s.maxCoeff());
    const Scalar stable = 0.45 * h * h / dmax;
    if (remaining / stable > static_cast<Scalar>(opts.substep_ceiling) - count)
      throw SolveError(t0 + (dt - remaining), remaining / stable,
                       "explicit route: required sub-step count exceeds the "
                       "configured ceiling");
    const Scalar step = std::min(stable, remaining);
    for (int c = 0; c < n - 1; ++c) g[c] = lg(s[c]);
    for (int i = 1; i < n - 1; ++i)
      u.values[i] += step * (g[i] - g[i - 1]) / h;
    remaining = (remaining - step <= stable * 1e-12) ? 0 : remaining - step;
    const Scalar t = t0 + (dt - remaining);
    u.values[0] = left.value(t);
    u.values[n - 1] = right.value(t);
    ++count;
  }
  if (stats) stats->substeps += count;
  return u;
}

// ---- whole-scenario driver ----

Diagnostics compute_diagnostics(const MonotoneGraph& g, const GridFunction& u,
                                const FluxField& flux) {
  Diagnostics d;
  const Vector s = forward_slopes(u);
  const Scalar h = u.h();
  for (Eigen::Index c = 0; c < s.size(); ++c) d.energy += h * primitive(g, s[c]);
  d.bv = bv_seminorm(u);
  d.min_second_difference = second_differences(u).minCoeff();
  d.max_abs_flux = flux.mid.size() ? flux.mid.cwiseAbs().maxCoeff() : 0;
  return d;
}

namespace {

FluxField admissible_midpoint_flux(const MonotoneGraph& g,
                                   const GridFunction& u) {
  const Vector s = forward_slopes(u);
  FluxField f;
  f.mid.resize(s.size());
  for (Eigen::Index c = 0; c < s.size(); ++c)
    f.mid[c] = eval_set(g, s[c]).mid();
  return f;
}

long step_count(const Scenario& sc) {
  const Scalar ratio = sc.T / sc.dt;
  const long steps = std::lround(ratio);
  if (steps < 1 || std::abs(ratio - steps) > 1e-6)
    throw std::invalid_argument("scenario: T must be an integer multiple of dt");
  return steps;
}

TimeSeries run_prox_series(const Scenario& sc, long steps, long* rounds_out) {
  TimeSeries ts;
  ts.meta = {Method::prox, 0, sc.n, sc.dt, scenario_fingerprint(sc)};
  GridFunction u = materialize(sc.initial, sc.n);
  {
    FluxField f0 = admissible_midpoint_flux(sc.graph, u);
    ts.snaps.push_back({0, u, f0, compute_diagnostics(sc.graph, u, f0)});
  }
  ProxStepper stepper(sc.graph, sc.n, sc.dt, sc.solver);
  for (long k = 1; k <= steps; ++k) {
    const Scalar t = k * sc.dt;
    StepStats st;
    try {
      auto [u_next, flux] = stepper.step(u, sc.left.value(t),
                                         sc.right.value(t), &st);
      u = std::move(u_next);
      if (rounds_out) *rounds_out += st.rounds;
      if (k % sc.snapshot_stride == 0 || k == steps)
        ts.snaps.push_back({t, u, flux,
                            compute_diagnostics(sc.graph, u, flux)});
    } catch (const SolveError& e) {
      throw SolveError(t, e.residual, e.what());
    }
  }
  return ts;
}

TimeSeries run_regularized_series(const Scenario& sc, Scalar eps, long steps,
                                  long* substeps_out) {
  TimeSeries ts;
  ts.meta = {Method::regularized, eps, sc.n, sc.dt, scenario_fingerprint(sc)};
  const SmoothMonotoneFn lg = mollify(sc.graph, eps);
  GridFunction u = materialize(sc.initial, sc.n);
  auto flux_of = [&](const GridFunction& v) {
    const Vector s = forward_slopes(v);
    FluxField f;
    f.mid.resize(s.size());
    for (Eigen::Index c = 0; c < s.size(); ++c) f.mid[c] = lg(s[c]);
    return f;
  };
  {
    FluxField f = flux_of(u);
    ts.snaps.push_back({0, u, f, compute_diagnostics(sc.graph, u, f)});
  }
  for (long k = 1; k <= steps; ++k) {
    const Scalar t = (k - 1) * sc.dt;
    StepStats st;
    u = step_regularized(lg, u, sc.left, sc.right, t, sc.dt, sc.solver, &st);
    if (substeps_out) *substeps_out += st.substeps;
    if (k % sc.snapshot_stride == 0 || k == steps) {
      FluxField f = flux_of(u);
      ts.snaps.push_back({k * sc.dt, u, f, compute_diagnostics(sc.graph, u, f)});
    }
  }
  return ts;
}

}  // namespace

RunResult run(const Scenario& sc) {
  validate_scenario(sc);
  const long steps = step_count(sc);
  const auto t0 = std::chrono::steady_clock::now();
  RunResult out;
  if (sc.method == Method::prox) {
    out.series = run_prox_series(sc, steps, &out.total_rounds);
  } else {
    for (Scalar eps : sc.epsilon_schedule)
      out.epsilon_series.push_back(
          run_regularized_series(sc, eps, steps, &out.total_substeps));
    if (out.epsilon_series.size() >= 2)
      out.convergence = epsilon_convergence_report(out.epsilon_series);
    out.series = out.epsilon_series.back();
  }
  out.wall_seconds =
      std::chrono::duration<Scalar>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

std::vector<ConvergenceEntry> epsilon_convergence_report(
    const std::vector<TimeSeries>& series) {
  if (series.size() < 2)
    throw std::invalid_argument(
        "epsilon_convergence_report: need at least two runs");
  const TimeSeries& finest = series.back();
  std::vector<ConvergenceEntry> out;
  for (std::size_t k = 0; k + 1 < series.size(); ++k) {
    const TimeSeries& s = series[k];
    if (s.meta.n != finest.meta.n || s.meta.dt != finest.meta.dt)
      throw std::invalid_argument(
          "epsilon_convergence_report: discretization mismatch between runs");
    if (std::abs(s.back().t - finest.back().t) > 1e-12)
      throw std::invalid_argument(
          "epsilon_convergence_report: final times differ");
    out.push_back(
        {s.meta.epsilon, l2_distance(s.back().u, finest.back().u)});
  }
  return out;
}

Scalar fit_observed_order(const std::vector<ConvergenceEntry>& report) {
  Scalar sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& e : report) {
    if (!(e.l2_to_finest > 0)) continue;
    const Scalar x = std::log(e.epsilon), y = std::log(e.l2_to_finest);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return std::numeric_limits<Scalar>::quiet_NaN();
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

FluxField flux_from_antiderivative(const MonotoneGraph& g,
                                   const GridFunction& u_new,
                                   const GridFunction& u_prev, Scalar dt) {
  if (u_new.n() != u_prev.n())
    throw std::invalid_argument("flux_from_antiderivative: size mismatch");
  const int cells = u_new.n() - 1;
  const Scalar h = u_new.h();
  const Vector s = forward_slopes(u_new);
  Vector partial(cells);
  partial[0] = 0;
  for (int c = 1; c < cells; ++c)
    partial[c] =
        partial[c - 1] + h * (u_new.values[c] - u_prev.values[c]) / dt;
  // slopes carry round-off from the update; give jump abscissae a little
  // slack so a facet cell one ulp off the jump still admits the whole range
  const Scalar snap = 1e-9;
  Scalar lo = -kInf, hi = kInf;
  for (int c = 0; c < cells; ++c) {
    const Interval set = eval_set_near(g, s[c], snap);
    lo = std::max(lo, set.lo - partial[c]);
    hi = std::min(hi, set.hi - partial[c]);
  }
  FluxField f;
  f.mid.resize(cells);
  Scalar base;
  // Singleton constraints from strictly monotone stretches pin the base up
  // to round-off in the partial sums, so an exactly empty intersection is
  // the normal case there; only a clearly empty one signals inconsistency.
  const Scalar slack = 1e-8;
  if (hi >= lo - slack) {
    base = std::clamp(eval_set(g, s[0]).mid(), std::min(lo, hi),
                      std::max(lo, hi));
  } else {
    base = 0.5 * (lo + hi);  // least-violating choice
    f.ambiguous_constant = true;
  }
  for (int c = 0; c < cells; ++c) f.mid[c] = base + partial[c];
  return f;
}

}  // namespace facetflow
