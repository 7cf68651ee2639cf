#ifndef CTAMG_ASSEMBLY_HPP
#define CTAMG_ASSEMBLY_HPP

#include <vector>

#include "ctamg/mesh.hpp"
#include "ctamg/sparse.hpp"

namespace ctamg {

/// Fine-level system assembled with linear (P1) elements, Dirichlet rows and
/// columns eliminated. The mass matrix lumps the eliminated boundary
/// couplings onto the diagonal, so its row sums stay the full hat-function
/// integrals and constant loads are integrated exactly.
/// interior_to_node maps unknown index -> mesh node.
struct AssembledProblem {
  SparseMatrix stiffness;
  SparseMatrix mass;
  std::vector<int> interior_to_node;
  std::vector<Point> node_coords;  // all mesh nodes
  int level = 0;

  // M-matrix witness: positive stiffness off-diagonals (can appear on poor
  // triangles); reported, not fatal
  int positive_offdiag_count = 0;
  double max_positive_offdiag = 0.0;

  int n_interior() const { return static_cast<int>(interior_to_node.size()); }
  Point interior_coord(int i) const { return node_coords[interior_to_node[i]]; }
};

/// P1 stiffness and mass over all nodes, no boundary treatment.
void assemble_full(const Mesh& mesh, SparseMatrix& stiffness, SparseMatrix& mass);

AssembledProblem assemble(const Mesh& mesh, int level = 0);

/// Load vector M*g from nodal samples g at the interior nodes.
Vector load_vector(const AssembledProblem& problem, const Vector& g);

}  // namespace ctamg

#endif
