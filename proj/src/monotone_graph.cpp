#include "facetflow/monotone_graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace facetflow {

namespace {

Scalar graph_scale(const std::vector<Knot>& knots,
                   const std::vector<Scalar>& slopes) {
  Scalar s = 1;
  for (const auto& k : knots)
    s = std::max({s, std::abs(k.p), std::abs(k.y_lo), std::abs(k.y_hi)});
  for (Scalar v : slopes) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

MonotoneGraph::MonotoneGraph() : slopes_{1} {}

MonotoneGraph::MonotoneGraph(std::vector<Knot> knots, std::vector<Scalar> slopes,
                             std::pair<Scalar, Scalar> anchor)
    : knots_(std::move(knots)),
      slopes_(std::move(slopes)),
      anchor_p_(anchor.first),
      anchor_y_(anchor.second) {
  if (slopes_.size() != knots_.size() + 1)
    throw std::invalid_argument("monotone graph: need knots+1 slopes");
  const Scalar scale = graph_scale(knots_, slopes_);
  const Scalar tol = 1e-9 * scale;
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (knots_[i].y_lo > knots_[i].y_hi + tol)
      throw std::invalid_argument("monotone graph: knot has y_lo > y_hi");
    if (i + 1 < knots_.size() && !(knots_[i].p < knots_[i + 1].p))
      throw std::invalid_argument(
          "monotone graph: knot abscissae must be strictly increasing");
  }
  for (Scalar& s : slopes_) {
    if (s < -tol)
      throw std::invalid_argument("monotone graph: negative slope segment");
    s = std::max(s, Scalar(0));
  }
  // Each gap's stored slope must reproduce the segment between the adjacent
  // knot values.
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    const Scalar gap = knots_[i + 1].p - knots_[i].p;
    const Scalar expect = knots_[i].y_hi + slopes_[i + 1] * gap;
    if (std::abs(expect - knots_[i + 1].y_lo) > tol * std::max<Scalar>(1, gap))
      throw std::invalid_argument(
          "monotone graph: slope inconsistent with knot values");
  }
}

MonotoneGraph MonotoneGraph::from_knots(std::vector<Knot> knots, Scalar tail_lo,
                                        Scalar tail_hi) {
  if (knots.empty())
    throw std::invalid_argument("from_knots: need at least one knot");
  std::vector<Scalar> slopes;
  slopes.reserve(knots.size() + 1);
  slopes.push_back(tail_lo);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const Scalar gap = knots[i + 1].p - knots[i].p;
    if (!(gap > 0))
      throw std::invalid_argument(
          "from_knots: knot abscissae must be strictly increasing");
    slopes.push_back((knots[i + 1].y_lo - knots[i].y_hi) / gap);
  }
  slopes.push_back(tail_hi);
  return MonotoneGraph(std::move(knots), std::move(slopes));
}

MonotoneGraph MonotoneGraph::affine(Scalar slope, Scalar p0, Scalar y0) {
  return MonotoneGraph({}, {slope}, {p0, y0});
}

MonotoneGraph MonotoneGraph::identity() { return affine(1); }

MonotoneGraph MonotoneGraph::sign() {
  return MonotoneGraph({{0, -1, 1}}, {0, 0});
}

MonotoneGraph MonotoneGraph::one_sided() {
  return MonotoneGraph({{0, 0, 0}}, {0, 2});
}

MonotoneGraph MonotoneGraph::tv_plus_linear() {
  return MonotoneGraph({{0, -1, 1}}, {1, 1});
}

MonotoneGraph MonotoneGraph::preset(std::string_view name) {
  if (name == "identity") return identity();
  if (name == "sign") return sign();
  if (name == "one_sided") return one_sided();
  if (name == "tv_plus_linear") return tv_plus_linear();
  throw std::invalid_argument("unknown graph preset: " + std::string(name));
}

namespace {

// Number of knots strictly below p.
std::size_t piece_index(const MonotoneGraph& g, Scalar p) {
  const auto& ks = g.knots();
  return std::lower_bound(ks.begin(), ks.end(), p,
                          [](const Knot& k, Scalar x) { return k.p < x; }) -
         ks.begin();
}

// Single value on the open piece with the given index (0 = below all knots).
Scalar value_on_piece(const MonotoneGraph& g, std::size_t piece, Scalar p) {
  const auto& ks = g.knots();
  if (ks.empty()) return g.anchor_y() + g.slopes()[0] * (p - g.anchor_p());
  if (piece == 0) return ks[0].y_lo + g.slopes()[0] * (p - ks[0].p);
  const Knot& left = ks[piece - 1];
  return left.y_hi + g.slopes()[piece] * (p - left.p);
}

}  // namespace

Interval eval_set(const MonotoneGraph& g, Scalar p) {
  const auto& ks = g.knots();
  const std::size_t i = piece_index(g, p);
  if (i < ks.size() && ks[i].p == p) return {ks[i].y_lo, ks[i].y_hi};
  const Scalar v = value_on_piece(g, i, p);
  return {v, v};
}

Interval eval_set_near(const MonotoneGraph& g, Scalar p, Scalar tol) {
  Interval out = eval_set(g, p);
  for (const auto& k : g.knots()) {
    if (std::abs(p - k.p) > tol) continue;
    out.lo = std::min(out.lo, k.y_lo);
    out.hi = std::max(out.hi, k.y_hi);
  }
  return out;
}

Scalar inclusion_gap(const MonotoneGraph& g, Scalar p, Scalar y) {
  Scalar d = eval_set(g, p).distance(y);
  for (const auto& k : g.knots()) {
    const Interval range{k.y_lo, k.y_hi};
    d = std::min(d, std::max(std::abs(p - k.p), range.distance(y)));
  }
  return d;
}

std::vector<Knot> jump_points(const MonotoneGraph& g) {
  std::vector<Knot> out;
  for (const auto& k : g.knots())
    if (k.y_lo < k.y_hi) out.push_back(k);
  return out;
}

Scalar primitive(const MonotoneGraph& g, Scalar p) {
  if (p == 0) return 0;
  const Scalar a = std::min<Scalar>(0, p), b = std::max<Scalar>(0, p);
  std::vector<Scalar> xs{a};
  for (const auto& k : g.knots())
    if (k.p > a && k.p < b) xs.push_back(k.p);
  xs.push_back(b);
  // Midpoint rule per linear piece is exact.
  Scalar total = 0;
  for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
    const Scalar len = xs[j + 1] - xs[j];
    const Scalar m = xs[j] + 0.5 * len;
    total += len * eval_set(g, m).lo;
  }
  return p > 0 ? total : -total;
}

Scalar resolvent(const MonotoneGraph& g, Scalar tau, Scalar q) {
  if (!(tau > 0)) throw std::invalid_argument("resolvent: tau must be > 0");
  const auto& ks = g.knots();
  const auto& sl = g.slopes();
  auto solve_piece = [&](Scalar p_ref, Scalar y_ref, Scalar s) {
    // x + tau*(y_ref + s*(x - p_ref)) = q
    return (q - tau * (y_ref - s * p_ref)) / (1 + tau * s);
  };
  if (ks.empty()) return solve_piece(g.anchor_p(), g.anchor_y(), sl[0]);

  // Largest knot index with p_i + tau*y_lo_i <= q (monotone in i).
  std::size_t lo = 0, hi = ks.size();
  while (lo < hi) {
    const std::size_t m = (lo + hi) / 2;
    if (ks[m].p + tau * ks[m].y_lo <= q)
      lo = m + 1;
    else
      hi = m;
  }
  if (lo == 0) {
    // Below the first knot.
    Scalar x = solve_piece(ks[0].p, ks[0].y_lo, sl[0]);
    return std::min(x, ks[0].p);
  }
  const std::size_t i = lo - 1;
  if (q <= ks[i].p + tau * ks[i].y_hi) return ks[i].p;
  Scalar x = solve_piece(ks[i].p, ks[i].y_hi, sl[i + 1]);
  x = std::max(x, ks[i].p);
  if (i + 1 < ks.size()) x = std::min(x, ks[i + 1].p);
  return x;
}

Scalar check_subdifferential(const MonotoneGraph& g, VectorRef p_grid, Scalar h) {
  Scalar worst = -std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 0; i < p_grid.size(); ++i) {
    const Scalar p = p_grid[i];
    const Interval set = eval_set(g, p);
    const Scalar wp = primitive(g, p);
    for (const Scalar d : {h, -h}) {
      const Scalar dw = primitive(g, p + d) - wp;
      worst = std::max(worst, set.lo * d - dw);
      worst = std::max(worst, set.hi * d - dw);
    }
  }
  return worst;
}

// ---- mollification ----

namespace {

// Centered quadratic B-spline, unit mass, support [-3/2, 3/2].
Scalar bspline2(Scalar t) {
  const Scalar a = std::abs(t);
  if (a >= 1.5) return 0;
  if (a <= 0.5) return 0.75 - t * t;
  const Scalar r = 1.5 - a;
  return 0.5 * r * r;
}

constexpr Scalar kGauss = 0.57735026918962576;  // 1/sqrt(3)

}  // namespace

SmoothMonotoneFn::SmoothMonotoneFn(MonotoneGraph base, Scalar epsilon)
    : base_(std::move(base)), eps_(epsilon), w_(2 * epsilon / 3) {
  if (!(epsilon > 0))
    throw std::invalid_argument("mollify: epsilon must be > 0");
}

SmoothMonotoneFn mollify(const MonotoneGraph& g, Scalar epsilon) {
  return SmoothMonotoneFn(g, epsilon);
}

namespace {

// Integration breakpoints in y for integrals over [-eps, eps] of
// f(p - y) * kernel(y): kernel piece edges plus knot hits of the argument.
void collect_breaks(const MonotoneGraph& g, Scalar p, Scalar eps,
                    std::vector<Scalar>& pts) {
  pts.clear();
  pts.push_back(-eps);
  pts.push_back(-eps / 3);
  pts.push_back(eps / 3);
  pts.push_back(eps);
  for (const auto& k : g.knots()) {
    const Scalar y = p - k.p;
    if (y > -eps && y < eps) pts.push_back(y);
  }
  std::sort(pts.begin(), pts.end());
}

}  // namespace

Scalar SmoothMonotoneFn::operator()(Scalar p) const {
  thread_local std::vector<Scalar> pts;
  collect_breaks(base_, p, eps_, pts);
  Scalar integral = 0;
  for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
    const Scalar len = pts[j + 1] - pts[j];
    if (len <= 0) continue;
    const Scalar mid = pts[j] + 0.5 * len, half = 0.5 * len;
    for (const Scalar gn : {-kGauss, kGauss}) {
      const Scalar y = mid + half * gn;
      integral += half * eval_set(base_, p - y).lo * bspline2(y / w_) / w_;
    }
  }
  return integral + eps_ * p;
}

Scalar SmoothMonotoneFn::derivative(Scalar p) const {
  thread_local std::vector<Scalar> pts;
  collect_breaks(base_, p, eps_, pts);
  Scalar integral = 0;
  for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
    const Scalar len = pts[j + 1] - pts[j];
    if (len <= 0) continue;
    const Scalar mid = pts[j] + 0.5 * len, half = 0.5 * len;
    for (const Scalar gn : {-kGauss, kGauss}) {
      const Scalar y = mid + half * gn;
      const std::size_t piece = piece_index(base_, p - y);
      integral += half * base_.slopes()[piece] * bspline2(y / w_) / w_;
    }
  }
  // Jumps contribute kernel mass directly.
  for (const auto& k : base_.knots()) {
    const Scalar jump = k.y_hi - k.y_lo;
    if (jump > 0) integral += jump * bspline2((p - k.p) / w_) / w_;
  }
  return integral + eps_;
}

Scalar SmoothMonotoneFn::derivative_bound(Scalar lo, Scalar hi) const {
  const Scalar a = std::min(lo, hi) - eps_, b = std::max(lo, hi) + eps_;
  const auto& ks = base_.knots();
  const auto& sl = base_.slopes();
  Scalar max_slope = 0, jump_sum = 0;
  const std::size_t first = piece_index(base_, a);
  const std::size_t last = piece_index(base_, b);
  for (std::size_t j = first; j <= last && j < sl.size(); ++j)
    max_slope = std::max(max_slope, sl[j]);
  for (const auto& k : ks)
    if (k.p >= a && k.p <= b) jump_sum += k.y_hi - k.y_lo;
  // Kernel peak is 3/(4w) = 9/(8 eps).
  return max_slope + jump_sum * 0.75 / w_ + eps_;
}

}  // namespace facetflow
