#pragma once

#include <array>
#include <vector>

#include "gmk/geometry.hpp"

namespace gmk::geom {

/// Convex hull of a full-dimensional point set in R^3.  Returns outward-oriented
/// triangles (CCW seen from outside); points on facet interiors are absorbed.
/// Deterministic: insertion follows input order, ties resolve to lower index.
/// Throws precondition_error when the set is degenerate (rank < 3).
std::vector<std::array<int, 3>> quickhull3(const std::vector<Vec>& pts);

}  // namespace gmk::geom
