#ifndef CTAMG_FRAME_HPP
#define CTAMG_FRAME_HPP

#include <vector>

#include "ctamg/amg.hpp"
#include "ctamg/sparse.hpp"

namespace ctamg {

/// Explicit multilevel frame system: block (d1,d2) = P_d1^T A_fine P_d2 with
/// P_d the prolongation composed from depth d up to the finest level.
/// Indexing is finest-first like the hierarchy.
struct FrameSystem {
  std::vector<std::vector<SparseMatrix>> blocks;
  std::vector<int> level_sizes;

  int level_count() const { return static_cast<int>(level_sizes.size()); }
  const SparseMatrix& block(int d1, int d2) const { return blocks[d1][d2]; }
};

struct FrameVector {
  std::vector<Vector> parts;  // parts[d] lives on depth d
};

struct FrameSolveResult {
  FrameVector solution;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = true;
};

/// Assembles all blocks. Diagonal blocks are the hierarchy matrices and the
/// lower triangle is the transpose of the upper one, so both frame
/// invariants hold exactly by construction.
FrameSystem build_frame(const Hierarchy& h);

/// parts[d] = restriction of the fine right-hand side to depth d by nested
/// application of the transposed prolongations.
FrameVector frame_rhs(const Hierarchy& h, const Vector& f_fine);

/// Sum of prolongated parts, P_0 u_0 + ... (finest part is added verbatim).
Vector project_to_fine(const Hierarchy& h, const FrameVector& u);

/// Jacobi-preconditioned conjugate gradients on the semi-definite frame
/// system; stops when the frame residual norm drops below tol * ||rhs||.
FrameSolveResult frame_solve(const FrameSystem& fs, const FrameVector& rhs, double tol,
                             int max_it);

}  // namespace ctamg

#endif
