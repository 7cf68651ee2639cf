#ifndef CTAMG_STUDY_HPP
#define CTAMG_STUDY_HPP

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctamg/combination.hpp"

namespace ctamg {

/// Bad input (missing files, malformed meshes, unknown geometry names).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The computation itself failed (non-convergence, impossible level range).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class StudyMode { kCt, kFullTp, kBoth };
enum class RhsKind { kConstant, kGaussian };

struct StudyConfig {
  std::string geometry = "square";  // square | disk | mesh:<path>
  std::vector<int> levels;          // ascending
  RhsKind rhs = RhsKind::kConstant;
  double corr_length = 1.0;
  double eps_str = 0.25;
  int jacobi_passes = 2;
  double truncation = 1e-3;
  double tol = 1e-8;
  int n_eval = 1000;
  unsigned long long seed = 1;
  StudyMode mode = StudyMode::kCt;
  int jobs = 1;
  std::string output_dir = "study_out";
};

struct StudyRow {
  int level = 0;
  int n_unknowns = 0;
  double error = 0.0;
  double solve_time = 0.0;  // subspace solves only
  bool all_converged = true;
};

struct StudyResult {
  std::vector<StudyRow> ct;
  std::vector<StudyRow> full_tp;
  std::string manifest;
};

/// Runs the configured convergence study. Nothing is written until the whole
/// study finished; progress notes go to log when given.
StudyResult run_study(const StudyConfig& cfg, std::ostream* log = nullptr);

/// Writes convergence_*.csv, timing_*.csv and manifest.txt into
/// cfg.output_dir.
void write_study_outputs(const StudyResult& result, const StudyConfig& cfg);

/// Univariate factor g with -lap(g) = 1 on the unit square, zero boundary;
/// the tensor solution for the unit load is g(x) g(y). Evaluated by a
/// boundary-layer-stable series, accurate to ~1e-12 away from corners.
double unit_square_poisson_factor(double x1, double x2);

/// Reference for the unit square with constant load.
Vector reference_square(const EvaluationSample& sample, const AssembledProblem& problem);

/// Discrete reference for a constant load on arbitrary geometry: one
/// univariate solve w = A^-1 M 1, reference(a,b) = w[a] w[b].
Vector reference_constant_discrete(const AssembledProblem& problem, const Hierarchy& h,
                                   const EvaluationSample& sample, double univariate_tol = 1e-10);

/// "3..6" or "4" or "3,5,7" -> ascending list.
std::vector<int> parse_level_range(const std::string& text);

/// Builds the mesh for a geometry name ("square", "disk", "mesh:<path>").
Mesh make_geometry(const std::string& geometry, int level);

}  // namespace ctamg

#endif
