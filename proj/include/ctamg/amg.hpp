#ifndef CTAMG_AMG_HPP
#define CTAMG_AMG_HPP

#include <memory>
#include <string>
#include <vector>

#include "ctamg/sparse.hpp"

namespace ctamg {

struct CoarseningParams {
  double eps_str = 0.25;          // strength measure, in (0,1)
  int max_levels = 50;
  int min_coarse_size = 4;        // stop once a level is at most this size
  int jacobi_passes = 2;          // smoothing passes applied to P
  double truncation_threshold = 1e-3;  // per-row relative truncation of P
  // relative truncation of the standard interpolation before smoothing;
  // trims the weak tail of the extended interpolatory sets
  double base_truncation = 0.0;
  // Hard cap on interpolation entries per fine row (strongest kept, row sum
  // rescaled); keeps the operator complexity bounded. 0 disables the cap.
  int interp_max_entries = 0;
  // Classical second pass: strong F-F pairs without a common coarse
  // interpolatory point promote a variable to coarse. Keeps the level-size
  // decay in the expected band on dense coarse-level graphs.
  bool ff_second_pass = true;
  // The interpolatory set of a fine variable joins the coarse strong
  // neighbors of its strong fine neighbors (union). The intersection variant
  // is kept for comparison; it is not used by default.
  bool interpolatory_set_intersection = false;
};

/// Per-row strong couplings S(i) and their transposes S^T(i).
struct StrengthSets {
  std::vector<std::vector<int>> strong;      // S(i): strongly negatively coupled
  std::vector<std::vector<int>> strong_transpose;  // {i' : i in S(i')}
};

/// Splitting of a level's variables into coarse and fine sets.
struct CFSplitting {
  std::vector<int> coarse;  // ascending
  std::vector<int> fine;    // ascending
  std::vector<char> is_coarse;
};

/// Algebraic multilevel hierarchy, finest level first. prolongations[d]
/// maps level d+1 (coarser) to level d and carries a unit row for every
/// coarse variable; matrices[d+1] is the Galerkin triple product.
struct Hierarchy {
  std::vector<SparseMatrix> matrices;
  std::vector<SparseMatrix> prolongations;

  int level_count() const { return static_cast<int>(matrices.size()); }
  int size(int depth) const { return matrices[depth].n_rows; }

  // dense factorization of the coarsest matrix, built once and shared by all
  // V-cycles (read-only after construction)
  struct CoarseSolver;
  std::shared_ptr<const CoarseSolver> coarse_solver;

  Vector coarse_solve(const Vector& b) const;
};

StrengthSets strength_sets(const SparseMatrix& a, double eps_str);

/// Standard coarsening: greedy selection by descending weight
/// lambda(i) = |S^T(i) ∩ U| + 2 |S^T(i) ∩ F|, ties broken by lowest index.
/// Variables the loop never reaches become coarse when their row is
/// diagonal-only and fine otherwise. ff_second_pass adds the classical
/// second sweep promoting variables where a strong F-F pair lacks a common
/// coarse point.
CFSplitting standard_coarsening(const SparseMatrix& a, double eps_str,
                                bool ff_second_pass = true);

/// Classical Ruge-Stueben standard interpolation for the given splitting.
/// Coarse rows are unit rows; fine rows distribute strong fine couplings
/// onto the interpolatory set and lump weak couplings into the diagonal.
SparseMatrix standard_interpolation(const SparseMatrix& a, const CFSplitting& split,
                                    const StrengthSets& s,
                                    bool interpolatory_set_intersection = false);

/// passes x (I - D^-1 A) applied to the fine rows of P; after each pass rows
/// are truncated relative to their largest entry and rescaled to keep their
/// row sum. Coarse rows stay unit rows. max_entries > 0 additionally caps
/// each fine row at its strongest entries.
SparseMatrix jacobi_prolongation_smoothing(const SparseMatrix& a, const SparseMatrix& p,
                                           const CFSplitting& split, int passes,
                                           double truncation, int max_entries = 0);

/// Drops fine-row entries below rel_threshold times the row maximum and, if
/// max_entries > 0, keeps only the largest-magnitude survivors; kept rows
/// are rescaled to the original row sum. Coarse rows pass through.
SparseMatrix truncate_interpolation_rows(const SparseMatrix& p, const CFSplitting& split,
                                         double rel_threshold, int max_entries);

Hierarchy build_hierarchy(const SparseMatrix& a_fine, const CoarseningParams& params);

/// Total nonzeros over all levels divided by fine-level nonzeros.
double operator_complexity(const Hierarchy& h);

/// Product of the stored prolongations mapping level from_depth up to
/// to_depth (to_depth <= from_depth; equal depths give the identity).
SparseMatrix compose_prolongation(const Hierarchy& h, int from_depth, int to_depth);

/// Writes matrix_k.mtx / prolongation_k.mtx per level plus manifest.txt with
/// level sizes, nonzeros and operator complexity.
void write_hierarchy(const Hierarchy& h, const std::string& directory);

}  // namespace ctamg

#endif
