#include "facetflow/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace facetflow {

namespace {

constexpr Scalar kNaN = std::numeric_limits<Scalar>::quiet_NaN();

std::string fmt(Scalar v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(Scalar v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Scalar facet_height(const GridFunction& u, const FacetRecord& rec) {
  const int node = static_cast<int>(
      std::lround(0.5 * (rec.xi_minus + rec.xi_plus) / u.h()));
  return u.values[std::clamp(node, 0, u.n() - 1)];
}

const char* status_name(InvariantStatus s) {
  switch (s) {
    case InvariantStatus::pass:
      return "pass";
    case InvariantStatus::fail:
      return "FAIL";
    default:
      return "hypothesis-violation";
  }
}

}  // namespace

namespace {

const FacetRecord* match_facet(const std::vector<FacetRecord>& recs,
                               const FacetRecord& rec) {
  for (const FacetRecord& cand : recs) {
    if (cand.isolated || std::abs(cand.theta - rec.theta) > 1e-12) continue;
    if (cand.xi_plus < rec.xi_minus || rec.xi_plus < cand.xi_minus) continue;
    return &cand;
  }
  return nullptr;
}

}  // namespace

void write_facet_trajectory(const TimeSeries& series, const MonotoneGraph& g,
                            std::ostream& out) {
  out << "t,theta,xi_minus,xi_plus,a,b,speed_predicted,speed_measured\n";
  const auto& snaps = series.snaps;
  std::vector<std::vector<FacetRecord>> all(snaps.size());
  for (std::size_t k = 0; k < snaps.size(); ++k)
    all[k] = facet_records(g, snaps[k].u);

  for (std::size_t k = 0; k < snaps.size(); ++k) {
    for (const FacetRecord& rec : all[k]) {
      // Height rate of the matching facet, centered when both neighbor
      // snapshots carry it (one-sided stencils bias a t^(-1/2)-type decay).
      Scalar measured = kNaN;
      if (!rec.isolated) {
        const FacetRecord* prev =
            k > 0 ? match_facet(all[k - 1], rec) : nullptr;
        const FacetRecord* next =
            k + 1 < snaps.size() ? match_facet(all[k + 1], rec) : nullptr;
        if (prev && next)
          measured = (facet_height(snaps[k + 1].u, *next) -
                      facet_height(snaps[k - 1].u, *prev)) /
                     (snaps[k + 1].t - snaps[k - 1].t);
        else if (prev)
          measured = (facet_height(snaps[k].u, rec) -
                      facet_height(snaps[k - 1].u, *prev)) /
                     (snaps[k].t - snaps[k - 1].t);
        else if (next)
          measured = (facet_height(snaps[k + 1].u, *next) -
                      facet_height(snaps[k].u, rec)) /
                     (snaps[k + 1].t - snaps[k].t);
      }
      out << fmt(snaps[k].t) << ',' << fmt(rec.theta) << ','
          << fmt(rec.xi_minus) << ',' << fmt(rec.xi_plus) << ','
          << fmt(rec.jump.lo) << ',' << fmt(rec.jump.hi) << ','
          << fmt(rec.speed) << ',' << fmt(measured) << "\n";
    }
  }
}

std::string compare_with_oracle(const TimeSeries& series,
                                const OracleSolution& oracle,
                                const MonotoneGraph* facet_graph) {
  std::ostringstream out;
  const bool facets =
      oracle.kind == OracleKind::facet_law && facet_graph != nullptr;
  out << "t,l2_error,linf_error";
  if (facets) out << ",halfwidth_run,halfwidth_oracle";
  out << "\n";
  for (const Snapshot& s : series.snaps) {
    if (s.t < oracle.t_domain.lo - 1e-12 || s.t > oracle.t_domain.hi + 1e-12)
      continue;
    const GridFunction ref = oracle.sample(s.u.n(), s.t);
    out << fmt_short(s.t) << ',' << fmt(l2_distance(s.u, ref)) << ','
        << fmt(linf_distance(s.u, ref));
    if (facets) {
      Scalar width = kNaN;
      for (const FacetRecord& rec : facet_records(*facet_graph, s.u))
        if (!rec.isolated &&
            (std::isnan(width) ||
             rec.xi_plus - rec.xi_minus > 2 * width))
          width = 0.5 * (rec.xi_plus - rec.xi_minus);
      out << ',' << fmt(width) << ',' << fmt(tv_vee_halfwidth(s.t));
    }
    out << "\n";
  }
  return out.str();
}

std::string compare_runs(const TimeSeries& a, const TimeSeries& b) {
  std::ostringstream out;
  const InvariantReport rep = check_l2_contraction(a, b);
  out << "t,l2_diff,linf_diff\n";
  for (std::size_t k = 0; k < a.snaps.size(); ++k)
    out << fmt_short(a.snaps[k].t) << ','
        << fmt(l2_distance(a.snaps[k].u, b.snaps[k].u)) << ','
        << fmt(linf_distance(a.snaps[k].u, b.snaps[k].u)) << "\n";
  out << "\ncontraction: " << status_name(rep.status)
      << "  worst_margin=" << fmt(rep.worst_margin)
      << "  tol=" << fmt(rep.tolerance) << "\n";
  return out.str();
}

std::string render_reports(const std::vector<InvariantReport>& reports) {
  std::ostringstream out;
  bool any_fail = false;
  for (const auto& r : reports) {
    out << r.invariant;
    for (std::size_t i = r.invariant.size(); i < 20; ++i) out << ' ';
    out << status_name(r.status) << "  worst_margin=" << fmt(r.worst_margin)
        << "  tol=" << fmt_short(r.tolerance);
    if (!r.note.empty()) out << "  (" << r.note << ")";
    out << "\n";
    any_fail = any_fail || r.status == InvariantStatus::fail;
  }
  out << (any_fail ? "RESULT: FAIL\n" : "RESULT: pass\n");
  return out.str();
}

}  // namespace facetflow
