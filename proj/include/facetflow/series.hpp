#pragma once

#include <string>
#include <vector>

#include "facetflow/grid.hpp"
#include "facetflow/scenario.hpp"

namespace facetflow {

enum class CellFlag : unsigned char {
  ok = 0,
  isolated_jump = 1,  // lone cell sitting on a jump abscissa; value is the
                      // jump midpoint and the cell is excluded from residual
                      // stencils
};

// Flux values at cell midpoints, size n-1.
struct FluxField {
  Vector mid;
  std::vector<CellFlag> flags;            // empty means all ok
  bool ambiguous_constant{false};         // additive constant not pinned down

  CellFlag flag(int c) const {
    return flags.empty() ? CellFlag::ok : flags[c];
  }
};

struct Diagnostics {
  Scalar energy{0};                 // sum h * W(slope_c)
  Scalar bv{0};                     // slope total variation
  Scalar min_second_difference{0};  // raw second differences
  Scalar max_abs_flux{0};
};

struct Snapshot {
  Scalar t{0};
  GridFunction u;
  FluxField flux;
  Diagnostics diag;
};

struct SeriesMeta {
  Method method{Method::prox};
  Scalar epsilon{0};  // 0 for the implicit route
  int n{0};
  Scalar dt{0};
  std::string fingerprint;
};

struct TimeSeries {
  SeriesMeta meta;
  std::vector<Snapshot> snaps;

  const Snapshot& front() const { return snaps.front(); }
  const Snapshot& back() const { return snaps.back(); }
};

}  // namespace facetflow
