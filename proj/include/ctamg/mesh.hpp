#ifndef CTAMG_MESH_HPP
#define CTAMG_MESH_HPP

#include <array>
#include <string>
#include <vector>

namespace ctamg {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Triangulation of a planar domain. Triangles are counter-clockwise;
/// boundary_nodes is sorted and duplicate-free.
struct Mesh {
  std::vector<Point> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> boundary_nodes;

  bool is_boundary(int node) const;
};

/// Validates orientation, edge manifoldness (each edge in 1 or 2 triangles,
/// opposite directions), duplicate triangles and boundary consistency.
/// Throws std::runtime_error describing the first violation.
void validate_mesh(const Mesh& m);

/// Structured triangulation of [0,1]^2 with mesh width 2^-level; every cell
/// is split along the same diagonal.
Mesh generate_square_mesh(int level);

/// Triangulation of the disk with center (0,0) and radius 0.5, maximum edge
/// length <= 2^-level. Nodes sit on rings of graded radii with a jittered
/// angular offset per ring, so the mesh carries no coarsenable structure.
/// Deterministic for a given level; boundary nodes lie exactly on the circle.
Mesh generate_disk_mesh(int level);

/// Text format: "nv nt nb" then nv lines "x y", nt lines "i j k" (0-based),
/// then nb boundary node indices.
Mesh load_mesh(const std::string& path);
void write_mesh(const Mesh& m, const std::string& path);

double triangle_area(const Point& a, const Point& b, const Point& c);

}  // namespace ctamg

#endif
