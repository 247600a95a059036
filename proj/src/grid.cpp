#include "facetflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace facetflow {

Vector forward_slopes(const GridFunction& u) {
  const int m = u.n() - 1;
  return (u.values.tail(m) - u.values.head(m)) / u.h();
}

Vector second_differences(const GridFunction& u) {
  const int m = u.n() - 2;
  return u.values.tail(m) - 2 * u.values.segment(1, m) + u.values.head(m);
}

Scalar l2_norm(VectorRef v, Scalar h) { return std::sqrt(h * v.squaredNorm()); }

Scalar l2_distance(const GridFunction& a, const GridFunction& b) {
  if (a.n() != b.n())
    throw std::invalid_argument("l2_distance: grid size mismatch");
  return l2_norm(a.values - b.values, a.h());
}

Scalar linf_distance(const GridFunction& a, const GridFunction& b) {
  if (a.n() != b.n())
    throw std::invalid_argument("linf_distance: grid size mismatch");
  return (a.values - b.values).cwiseAbs().maxCoeff();
}

Scalar bv_seminorm(const GridFunction& u) {
  const Vector s = forward_slopes(u);
  Scalar total = 0;
  for (Eigen::Index c = 0; c + 1 < s.size(); ++c)
    total += std::abs(s[c + 1] - s[c]);
  return total;
}

BoundaryEvaluator BoundaryEvaluator::constant(Scalar v) {
  BoundaryEvaluator b;
  b.pts_ = {{0, v}};
  return b;
}

BoundaryEvaluator BoundaryEvaluator::table(
    std::vector<std::pair<Scalar, Scalar>> pts) {
  if (pts.empty())
    throw std::invalid_argument("boundary table: need at least one point");
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (!(pts[i].first < pts[i + 1].first))
      throw std::invalid_argument(
          "boundary table: times must be strictly increasing");
  BoundaryEvaluator b;
  b.pts_ = std::move(pts);
  return b;
}

bool BoundaryEvaluator::is_constant() const {
  for (const auto& [t, v] : pts_)
    if (v != pts_.front().second) return false;
  return true;
}

Scalar BoundaryEvaluator::value(Scalar t) const {
  if (t <= pts_.front().first) return pts_.front().second;
  if (t >= pts_.back().first) return pts_.back().second;
  auto it = std::upper_bound(
      pts_.begin(), pts_.end(), t,
      [](Scalar x, const std::pair<Scalar, Scalar>& p) { return x < p.first; });
  const auto& [t1, v1] = *it;
  const auto& [t0, v0] = *(it - 1);
  return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
}

Scalar BoundaryEvaluator::rate(Scalar t) const {
  if (pts_.size() < 2 || t < pts_.front().first || t >= pts_.back().first)
    return 0;
  auto it = std::upper_bound(
      pts_.begin(), pts_.end(), t,
      [](Scalar x, const std::pair<Scalar, Scalar>& p) { return x < p.first; });
  if (it == pts_.begin() || it == pts_.end()) return 0;
  const auto& [t1, v1] = *it;
  const auto& [t0, v0] = *(it - 1);
  return (v1 - v0) / (t1 - t0);
}

}  // namespace facetflow
