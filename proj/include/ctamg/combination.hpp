#ifndef CTAMG_COMBINATION_HPP
#define CTAMG_COMBINATION_HPP

#include <functional>
#include <utility>
#include <vector>

#include "ctamg/amg.hpp"
#include "ctamg/assembly.hpp"
#include "ctamg/sparse.hpp"
#include "ctamg/tensor_solver.hpp"

namespace ctamg {

/// Pair of combination levels; level J is the finest, level 0 the coarsest
/// used by the technique. Level j lives at hierarchy depth J - j.
struct LevelPair {
  int row = 0;
  int col = 0;
  friend bool operator<(const LevelPair& a, const LevelPair& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  }
  friend bool operator==(const LevelPair& a, const LevelPair& b) {
    return a.row == b.row && a.col == b.col;
  }
};

/// Index set of the combination technique: +1 terms on level sum J,
/// -1 terms on level sum J-1.
struct MultiIndexSet {
  std::vector<LevelPair> plus;
  std::vector<LevelPair> minus;
  int level = 0;  // J
};

MultiIndexSet enumerate_indices(int level);

struct CombinedTerm {
  int sign = 1;
  LevelPair pair;
  DenseGrid solution;
  SolveStats stats;
};

struct CombinedSolution {
  std::vector<CombinedTerm> terms;  // sorted by level pair
  const Hierarchy* hierarchy = nullptr;
  int level = 0;
};

/// Random fine node pairs the combined solution is evaluated at.
struct EvaluationSample {
  std::vector<std::pair<int, int>> pairs;
  int count = 0;
  unsigned long long seed = 0;
};

/// Uniform pairs over [0, n_fine)^2, reproducible for a given seed.
EvaluationSample make_evaluation_sample(int n_fine, int count, unsigned long long seed);

/// Low-rank factorization K ~ sum_r columns[r] columns[r]^T with a trace
/// error certificate.
struct LowRankFactor {
  std::vector<Vector> columns;
  int rank = 0;
  double trace_error = 0.0;
  bool hit_max_rank = false;
};

/// Restriction of the fine tensor right-hand side to the given level pair,
/// applied direction-wise with composed transposed prolongations.
DenseGrid subproblem_rhs(const DenseGrid& f_fine, const Hierarchy& h, int level,
                         const LevelPair& pair);

/// Rank-one tensor load (M 1)(M 1)^T for f(x,y) = 1.
DenseGrid tensor_load_constant(const AssembledProblem& problem);
Vector tensor_load_constant_factor(const AssembledProblem& problem);

/// Tensor load M K M^T for the Gaussian kernel K_ik = exp(-|x_i-x_k|^2 / l)
/// over the interior nodes. Refuses to form K densely for more than 20000
/// unknowns; use gaussian_kernel_row with pivoted_cholesky at that scale.
DenseGrid tensor_load_kernel(const AssembledProblem& problem, double corr_length);

std::function<Vector(int)> gaussian_kernel_row(const AssembledProblem& problem,
                                               double corr_length);

/// Greedy pivoted Cholesky on the largest remaining diagonal entry (ties:
/// lowest index); stops once the remaining trace is at most
/// tol_trace * initial trace.
LowRankFactor pivoted_cholesky(const Vector& diag, const std::function<Vector(int)>& kernel_row,
                               double tol_trace, int max_rank);

/// Solves every subproblem of the index set; terms with non-converged solves
/// are kept and flagged in their stats. jobs > 1 solves terms concurrently.
CombinedSolution solve_all(const DenseGrid& f_fine, const Hierarchy& h,
                           const MultiIndexSet& idx, double tol, const AmgCycleConfig& cfg,
                           int max_it = 200, int jobs = 1);

/// Same, with the fine load given as factors: F = sum_r b_r b_r^T. The
/// subproblem loads are restrictions of the factors, so the fine grid is
/// never materialized.
CombinedSolution solve_all_factored(const std::vector<Vector>& factors, const Hierarchy& h,
                                    const MultiIndexSet& idx, double tol,
                                    const AmgCycleConfig& cfg, int max_it = 200, int jobs = 1);

/// Evaluates the combination at the sampled fine node pairs through rows of
/// the composed prolongations; partial solutions are never prolongated in
/// full.
Vector evaluate_combined(const CombinedSolution& c, const EvaluationSample& sample);

/// ||approx - ref||_2 / ||ref||_2
double relative_error(const Vector& approx, const Vector& ref);

/// Exact solution of the disk problem with unit load, evaluated at the
/// sampled interior node pairs.
Vector reference_disk(const EvaluationSample& sample, const AssembledProblem& problem);

/// Reference for low-rank loads: one univariate solve per rank term at
/// solver tolerance univariate_tol, combined as sum_r w_r[a] w_r[b].
Vector reference_lowrank(const AssembledProblem& problem, const Hierarchy& h,
                         const LowRankFactor& lr, const EvaluationSample& sample,
                         double univariate_tol = 1e-10);

}  // namespace ctamg

#endif
