#ifndef CTAMG_DELAUNAY_HPP
#define CTAMG_DELAUNAY_HPP

#include <array>
#include <vector>

#include "ctamg/mesh.hpp"

namespace ctamg::detail {

/// Bowyer-Watson Delaunay triangulation of a point set. Points must be
/// pairwise distinct and not all collinear. Returned triangles are CCW and
/// indexed into the input array.
std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Point>& points);

}  // namespace ctamg::detail

#endif
