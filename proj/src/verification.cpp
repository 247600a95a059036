#include "facetflow/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace facetflow {

namespace {

constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();

// Monotone-decay report skeleton: values per snapshot, margins = backward
// differences value_k - value_{k+1}.
InvariantReport decay_report(std::string name, const TimeSeries& series,
                             std::vector<Scalar> values, Scalar tolerance) {
  InvariantReport r;
  r.invariant = std::move(name);
  r.values = std::move(values);
  r.tolerance = tolerance;
  r.fingerprint = series.meta.fingerprint;
  r.worst_margin = kInf;
  for (std::size_t k = 0; k + 1 < r.values.size(); ++k) {
    r.margins.push_back(r.values[k] - r.values[k + 1]);
    r.worst_margin = std::min(r.worst_margin, r.margins.back());
  }
  if (r.margins.empty()) r.worst_margin = 0;
  r.status = r.worst_margin >= -tolerance ? InvariantStatus::pass
                                          : InvariantStatus::fail;
  return r;
}

bool constant_endpoints(const TimeSeries& series, Scalar tol = 1e-12) {
  const auto& snaps = series.snaps;
  const Scalar a0 = snaps.front().u.values[0];
  const Scalar b0 = snaps.front().u.values[snaps.front().u.n() - 1];
  for (const auto& s : snaps)
    if (std::abs(s.u.values[0] - a0) > tol ||
        std::abs(s.u.values[s.u.n() - 1] - b0) > tol)
      return false;
  return true;
}

void require_nonempty(const TimeSeries& series) {
  if (series.snaps.empty())
    throw std::invalid_argument("invariant check: series has no snapshots");
}

}  // namespace

Scalar default_invariant_tol(const TimeSeries& series) {
  return series.meta.method == Method::prox ? 1e-8 : 1e-4;
}

InvariantReport check_bv_monotone(const TimeSeries& series, Scalar tolerance) {
  require_nonempty(series);
  if (tolerance <= 0) tolerance = default_invariant_tol(series);
  std::vector<Scalar> values;
  for (const auto& s : series.snaps) values.push_back(bv_seminorm(s.u));
  return decay_report("bv_monotone", series, std::move(values), tolerance);
}

InvariantReport check_l2_contraction(const TimeSeries& a, const TimeSeries& b,
                                     Scalar tolerance) {
  require_nonempty(a);
  require_nonempty(b);
  if (tolerance <= 0)
    tolerance = std::max(default_invariant_tol(a), default_invariant_tol(b));
  if (a.meta.n != b.meta.n || a.snaps.size() != b.snaps.size())
    throw std::invalid_argument(
        "check_l2_contraction: runs must share grid and snapshot layout");
  for (std::size_t k = 0; k < a.snaps.size(); ++k)
    if (std::abs(a.snaps[k].t - b.snaps[k].t) > 1e-12)
      throw std::invalid_argument(
          "check_l2_contraction: snapshot times differ");
  std::vector<Scalar> values;
  for (std::size_t k = 0; k < a.snaps.size(); ++k)
    values.push_back(l2_distance(a.snaps[k].u, b.snaps[k].u));
  InvariantReport r = decay_report("l2_contraction", a, std::move(values),
                                   tolerance);
  r.fingerprint = a.meta.fingerprint + "+" + b.meta.fingerprint;
  return r;
}

InvariantReport check_convexity(const TimeSeries& series, Scalar tolerance) {
  require_nonempty(series);
  if (tolerance <= 0) tolerance = default_invariant_tol(series);
  InvariantReport r;
  r.invariant = "convexity";
  r.tolerance = tolerance;
  r.fingerprint = series.meta.fingerprint;
  r.worst_margin = kInf;

  const Scalar initial_min = second_differences(series.front().u).minCoeff();
  if (initial_min < -tolerance) {
    r.status = InvariantStatus::hypothesis_violation;
    r.note = "initial profile is not convex";
    r.worst_margin = initial_min;
    return r;
  }
  if (!constant_endpoints(series)) {
    r.status = InvariantStatus::hypothesis_violation;
    r.note = "endpoint values vary in time";
    r.worst_margin = 0;
    return r;
  }
  for (const auto& s : series.snaps) {
    const Scalar m = second_differences(s.u).minCoeff();
    r.values.push_back(m);
    r.margins.push_back(m);
    r.worst_margin = std::min(r.worst_margin, m);
  }
  r.status = r.worst_margin >= -tolerance ? InvariantStatus::pass
                                          : InvariantStatus::fail;
  return r;
}

InvariantReport check_energy_dissipation(const TimeSeries& series,
                                         const MonotoneGraph& g,
                                         Scalar tolerance) {
  require_nonempty(series);
  if (tolerance <= 0) tolerance = default_invariant_tol(series);
  if (!constant_endpoints(series)) {
    InvariantReport r;
    r.invariant = "energy_dissipation";
    r.tolerance = tolerance;
    r.fingerprint = series.meta.fingerprint;
    r.status = InvariantStatus::hypothesis_violation;
    r.note = "endpoint values vary in time";
    return r;
  }
  std::vector<Scalar> values;
  for (const auto& s : series.snaps) {
    const Vector slopes = forward_slopes(s.u);
    Scalar energy = 0;
    for (Eigen::Index c = 0; c < slopes.size(); ++c)
      energy += s.u.h() * primitive(g, slopes[c]);
    values.push_back(energy);
  }
  return decay_report("energy_dissipation", series, std::move(values),
                      tolerance);
}

InvariantReport check_flux_bound(const TimeSeries& series,
                                 const MonotoneGraph& g, Scalar tolerance) {
  require_nonempty(series);
  if (tolerance <= 0) tolerance = default_invariant_tol(series);
  const Vector s0 = forward_slopes(series.front().u);
  const Scalar smax = s0.cwiseAbs().maxCoeff();
  const Scalar bound = std::max(std::abs(eval_set(g, -1 - smax).lo),
                                std::abs(eval_set(g, 1 + smax).hi));
  InvariantReport r;
  r.invariant = "flux_bound";
  r.tolerance = tolerance;
  r.fingerprint = series.meta.fingerprint;
  r.worst_margin = kInf;
  for (const auto& s : series.snaps) {
    const Scalar peak =
        s.flux.mid.size() ? s.flux.mid.cwiseAbs().maxCoeff() : 0;
    r.values.push_back(peak);
    r.margins.push_back(bound - peak);
    r.worst_margin = std::min(r.worst_margin, r.margins.back());
  }
  r.note = "bound " + std::to_string(bound);
  r.status = r.worst_margin >= -tolerance ? InvariantStatus::pass
                                          : InvariantStatus::fail;
  return r;
}

std::vector<InvariantReport> check_all(const TimeSeries& series,
                                       const MonotoneGraph& g,
                                       Scalar tolerance) {
  return {check_bv_monotone(series, tolerance),
          check_convexity(series, tolerance),
          check_energy_dissipation(series, g, tolerance),
          check_flux_bound(series, g, tolerance)};
}

}  // namespace facetflow
