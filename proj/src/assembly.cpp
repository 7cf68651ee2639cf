#include "ctamg/assembly.hpp"

#include <cmath>
#include <stdexcept>

namespace ctamg {

namespace {

// element contributions for a P1 triangle: ke = |T| * grad_i . grad_j,
// me = |T|/12 * (1 + delta_ij)
void element_matrices(const Point& p0, const Point& p1, const Point& p2,
                      double ke[3][3], double me[3][3], double& area) {
  area = triangle_area(p0, p1, p2);
  if (!(area > 0.0)) throw std::runtime_error("assemble: degenerate triangle");
  const double b[3] = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
  const double c[3] = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
  const double f = 1.0 / (4.0 * area);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      ke[i][j] = f * (b[i] * b[j] + c[i] * c[j]);
      me[i][j] = area / 12.0 * (i == j ? 2.0 : 1.0);
    }
}

}  // namespace

void assemble_full(const Mesh& mesh, SparseMatrix& stiffness, SparseMatrix& mass) {
  const int nv = static_cast<int>(mesh.nodes.size());
  double bbox_area;
  {
    double xmin = mesh.nodes[0].x, xmax = xmin, ymin = mesh.nodes[0].y, ymax = ymin;
    for (const Point& p : mesh.nodes) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    bbox_area = std::max((xmax - xmin) * (ymax - ymin), 1e-300);
  }

  std::vector<int> ti, tj;
  std::vector<double> kv, mv;
  ti.reserve(mesh.triangles.size() * 9);
  tj.reserve(mesh.triangles.size() * 9);
  kv.reserve(mesh.triangles.size() * 9);
  mv.reserve(mesh.triangles.size() * 9);

  for (const auto& tri : mesh.triangles) {
    double ke[3][3], me[3][3], area;
    element_matrices(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]], ke, me, area);
    if (area < 1e-14 * bbox_area) throw std::runtime_error("assemble: degenerate triangle");
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        ti.push_back(tri[i]);
        tj.push_back(tri[j]);
        kv.push_back(ke[i][j]);
        mv.push_back(me[i][j]);
      }
  }
  stiffness = SparseMatrix::from_triplets(nv, nv, ti, tj, kv, /*drop_zeros=*/true);
  mass = SparseMatrix::from_triplets(nv, nv, std::move(ti), std::move(tj), std::move(mv));
}

AssembledProblem assemble(const Mesh& mesh, int level) {
  validate_mesh(mesh);
  SparseMatrix k_full, m_full;
  assemble_full(mesh, k_full, m_full);

  const int nv = static_cast<int>(mesh.nodes.size());
  std::vector<int> node_to_interior(nv, -1);
  AssembledProblem p;
  p.level = level;
  p.node_coords = mesh.nodes;
  for (int v = 0; v < nv; ++v)
    if (!mesh.is_boundary(v)) {
      node_to_interior[v] = static_cast<int>(p.interior_to_node.size());
      p.interior_to_node.push_back(v);
    }

  // stiffness: plain elimination of boundary rows and columns. mass: the
  // eliminated couplings are lumped onto the diagonal so each row keeps the
  // full integral of its hat function; loads for f = 1 are then exact.
  auto restrict_interior = [&](const SparseMatrix& a, bool drop_zeros, bool lump_boundary) {
    std::vector<int> ti, tj;
    std::vector<double> tv;
    for (int i = 0; i < nv; ++i) {
      if (node_to_interior[i] < 0) continue;
      for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
        const int j = a.col_indices[k];
        ti.push_back(node_to_interior[i]);
        if (node_to_interior[j] < 0) {
          if (!lump_boundary) {
            ti.pop_back();
            continue;
          }
          tj.push_back(node_to_interior[i]);
        } else {
          tj.push_back(node_to_interior[j]);
        }
        tv.push_back(a.values[k]);
      }
    }
    const int n = static_cast<int>(p.interior_to_node.size());
    return SparseMatrix::from_triplets(n, n, std::move(ti), std::move(tj), std::move(tv),
                                       drop_zeros);
  };
  p.stiffness = restrict_interior(k_full, true, false);
  p.mass = restrict_interior(m_full, false, true);

  for (int i = 0; i < p.stiffness.n_rows; ++i)
    for (int k = p.stiffness.row_offsets[i]; k < p.stiffness.row_offsets[i + 1]; ++k)
      if (p.stiffness.col_indices[k] != i && p.stiffness.values[k] > 0.0) {
        ++p.positive_offdiag_count;
        p.max_positive_offdiag = std::max(p.max_positive_offdiag, p.stiffness.values[k]);
      }
  return p;
}

Vector load_vector(const AssembledProblem& problem, const Vector& g) {
  if (static_cast<int>(g.size()) != problem.n_interior())
    throw std::invalid_argument("load_vector: dimension mismatch");
  return spmv(problem.mass, g);
}

}  // namespace ctamg
