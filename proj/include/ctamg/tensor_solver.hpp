#ifndef CTAMG_TENSOR_SOLVER_HPP
#define CTAMG_TENSOR_SOLVER_HPP

#include <functional>

#include "ctamg/amg.hpp"
#include "ctamg/sparse.hpp"

namespace ctamg {

struct AmgCycleConfig {
  int pre_smooth = 1;   // forward Gauss-Seidel sweeps
  int post_smooth = 1;  // backward Gauss-Seidel sweeps
};

/// One anisotropic Kronecker subproblem (A_row (x) A_col) vec(X) = vec(rhs),
/// each direction backed by a hierarchy entered at the given depth.
struct TensorProblem {
  const Hierarchy* row_hierarchy = nullptr;
  int row_depth = 0;
  const Hierarchy* col_hierarchy = nullptr;
  int col_depth = 0;
  DenseGrid rhs;
};

struct SolveStats {
  int iterations = 0;
  double final_relative_residual = 0.0;
  double wall_time = 0.0;
  bool converged = true;
  int non_monotone_steps = 0;  // residual growth > 10% between iterations
};

/// One V-cycle on the hierarchy starting at the given depth. The coarsest
/// level is solved directly.
Vector amg_vcycle(const Hierarchy& h, int depth, const Vector& b, const Vector& x0,
                  const AmgCycleConfig& cfg);

/// Direction-wise tensor-product iteration: X <- X + M(F - A_row X A_col^T)
/// where M applies one V-cycle per column with the row hierarchy and one per
/// row with the column hierarchy. Stops when ||R||_F/||F||_F <= tol.
std::pair<DenseGrid, SolveStats> tensor_solve(const TensorProblem& p, double tol, int max_it,
                                              const AmgCycleConfig& cfg);

/// Exact dense solve X = A^-1 F B^-T; guard: A.n_rows*B.n_rows <= 10^4.
DenseGrid dense_kron_solve(const SparseMatrix& a, const SparseMatrix& b, const DenseGrid& f);

/// Preconditioned conjugate gradients; returns (solution, iterations).
/// precond maps a residual to a correction; identity when empty.
std::pair<Vector, int> pcg(const SparseMatrix& a, const Vector& b, double tol, int max_it,
                           const std::function<Vector(const Vector&)>& precond = {});

}  // namespace ctamg

#endif
