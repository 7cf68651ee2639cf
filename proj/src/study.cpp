#include "ctamg/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace ctamg {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(const char* format, double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

}  // namespace

double unit_square_poisson_factor(double x1, double x2) {
  // evaluate the series in the direction with more distance to the boundary;
  // the solution is symmetric in its arguments
  const double d1 = std::min(x1, 1.0 - x1);
  const double d2 = std::min(x2, 1.0 - x2);
  if (d1 > d2) std::swap(x1, x2);

  double sum = x1 * (1.0 - x1) / 2.0;
  const double t = std::abs(x2 - 0.5);
  for (int k = 1; k <= 200001; k += 2) {
    const double a = k * kPi * t;
    const double b = k * kPi * 0.5;
    // cosh(a)/cosh(b) without overflow, a <= b
    const double ratio = (std::exp(a - b) + std::exp(-a - b)) / (1.0 + std::exp(-2.0 * b));
    const double coeff = 4.0 / (kPi * kPi * kPi * k * k * k);
    sum -= coeff * std::sin(k * kPi * x1) * ratio;
    if (coeff * ratio < 1e-14) break;
  }
  return sum;
}

Vector reference_square(const EvaluationSample& sample, const AssembledProblem& problem) {
  std::vector<double> g(problem.n_interior());
  for (int i = 0; i < problem.n_interior(); ++i) {
    const Point p = problem.interior_coord(i);
    g[i] = unit_square_poisson_factor(p.x, p.y);
  }
  Vector out(sample.pairs.size());
  for (std::size_t s = 0; s < sample.pairs.size(); ++s)
    out[s] = g[sample.pairs[s].first] * g[sample.pairs[s].second];
  return out;
}

Vector reference_constant_discrete(const AssembledProblem& problem, const Hierarchy& h,
                                   const EvaluationSample& sample, double univariate_tol) {
  LowRankFactor lr;
  lr.columns.push_back(Vector(problem.n_interior(), 1.0));
  lr.rank = 1;
  return reference_lowrank(problem, h, lr, sample, univariate_tol);
}

std::vector<int> parse_level_range(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      const int lo = std::stoi(text.substr(0, dots));
      const int hi = std::stoi(text.substr(dots + 2));
      for (int j = lo; j <= hi; ++j) out.push_back(j);
    } else {
      std::stringstream ss(text);
      std::string tok;
      while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    }
  } catch (const std::exception&) {
    throw InputError("cannot parse level range '" + text + "'");
  }
  if (out.empty() || !std::is_sorted(out.begin(), out.end()) || out.front() < 0)
    throw InputError("level range must be ascending and non-negative: '" + text + "'");
  return out;
}

Mesh make_geometry(const std::string& geometry, int level) {
  if (geometry == "square") return generate_square_mesh(level);
  if (geometry == "disk") return generate_disk_mesh(level);
  if (geometry.rfind("mesh:", 0) == 0) {
    try {
      return load_mesh(geometry.substr(5));
    } catch (const std::exception& e) {
      throw InputError(e.what());
    }
  }
  throw InputError("unknown geometry '" + geometry + "'");
}

StudyResult run_study(const StudyConfig& cfg, std::ostream* log) {
  if (cfg.levels.empty()) throw InputError("study: empty level list");
  if (!(cfg.tol > 0.0)) throw InputError("study: tolerance must be positive");

  const bool mesh_from_file = cfg.geometry.rfind("mesh:", 0) == 0;
  const bool run_ct = cfg.mode != StudyMode::kFullTp;
  const bool run_tp = cfg.mode != StudyMode::kCt;

  StudyResult result;
  std::ostringstream manifest;
  manifest << "ctamg study manifest\n";
  manifest << "geometry = " << cfg.geometry << "\n";
  manifest << "levels =";
  for (int j : cfg.levels) manifest << " " << j;
  manifest << "\nrhs = " << (cfg.rhs == RhsKind::kConstant ? "constant" : "gaussian") << "\n";
  if (cfg.rhs == RhsKind::kGaussian)
    manifest << "corr_length = " << fmt("%.12g", cfg.corr_length) << "\n";
  manifest << "eps_str = " << fmt("%.12g", cfg.eps_str) << "\n";
  manifest << "jacobi_passes = " << cfg.jacobi_passes << "\n";
  manifest << "truncation = " << fmt("%.12g", cfg.truncation) << "\n";
  manifest << "tol = " << fmt("%.12g", cfg.tol) << "\n";
  manifest << "n_eval = " << cfg.n_eval << "\n";
  manifest << "seed = " << cfg.seed << "\n";
  manifest << "mode = "
           << (cfg.mode == StudyMode::kCt ? "ct"
                                          : cfg.mode == StudyMode::kFullTp ? "full_tp" : "both")
           << "\n";
  manifest << "jobs = " << cfg.jobs << "\n";
  manifest << "out = " << cfg.output_dir << "\n\n";

  // meshes from files do not refine with the level, so load them once
  Mesh file_mesh;
  if (mesh_from_file) file_mesh = make_geometry(cfg.geometry, cfg.levels.front());

  for (const int level : cfg.levels) {
    if (log) (*log) << "[study] level " << level << ": meshing and assembling\n";
    const Mesh mesh = mesh_from_file ? file_mesh : make_geometry(cfg.geometry, level);
    const AssembledProblem problem = assemble(mesh, level);
    const int n = problem.n_interior();
    if (n == 0) throw NumericalError("study: no interior unknowns at level " +
                                     std::to_string(level));

    CoarseningParams params;
    params.eps_str = cfg.eps_str;
    params.jacobi_passes = cfg.jacobi_passes;
    params.truncation_threshold = cfg.truncation;
    const Hierarchy h = build_hierarchy(problem.stiffness, params);
    if (h.level_count() < level + 1)
      throw NumericalError("study: coarsening produced " + std::to_string(h.level_count()) +
                           " levels, need " + std::to_string(level + 1));

    manifest << "level " << level << ": unknowns " << n << ", hierarchy sizes";
    for (int d = h.level_count() - 1; d >= 0; --d) manifest << " " << h.size(d);
    manifest << ", operator_complexity " << fmt("%.4f", operator_complexity(h));
    if (problem.positive_offdiag_count > 0)
      manifest << ", positive_offdiagonals " << problem.positive_offdiag_count << " (max "
               << fmt("%.3e", problem.max_positive_offdiag) << ")";
    manifest << "\n";

    // tensor load as factors F = sum_r b_r b_r^T
    std::vector<Vector> factors;
    LowRankFactor lr;
    if (cfg.rhs == RhsKind::kConstant) {
      factors.push_back(tensor_load_constant_factor(problem));
    } else {
      Vector diag(n, 1.0);  // Gaussian kernel has unit diagonal
      lr = pivoted_cholesky(diag, gaussian_kernel_row(problem, cfg.corr_length), 1e-8, n);
      manifest << "level " << level << ": kernel rank " << lr.rank << ", trace error "
               << fmt("%.3e", lr.trace_error) << "\n";
      for (const Vector& col : lr.columns) factors.push_back(spmv(problem.mass, col));
    }

    const EvaluationSample sample = make_evaluation_sample(n, cfg.n_eval, cfg.seed);

    Vector ref;
    if (cfg.rhs == RhsKind::kGaussian) {
      ref = reference_lowrank(problem, h, lr, sample);
      manifest << "level " << level << ": reference = lowrank (rank " << lr.rank << ")\n";
    } else if (cfg.geometry == "disk") {
      ref = reference_disk(sample, problem);
      manifest << "level " << level << ": reference = analytic disk\n";
    } else if (cfg.geometry == "square") {
      ref = reference_square(sample, problem);
      manifest << "level " << level << ": reference = analytic square series\n";
    } else {
      ref = reference_constant_discrete(problem, h, sample);
      manifest << "level " << level << ": reference = rank-one discrete\n";
    }

    const AmgCycleConfig cycle;
    if (run_ct) {
      if (log) (*log) << "[study] level " << level << ": combination solves\n";
      const MultiIndexSet idx = enumerate_indices(level);
      const CombinedSolution c =
          solve_all_factored(factors, h, idx, cfg.tol, cycle, 200, cfg.jobs);
      StudyRow row;
      row.level = level;
      row.n_unknowns = n;
      for (const CombinedTerm& t : c.terms) {
        row.solve_time += t.stats.wall_time;
        row.all_converged = row.all_converged && t.stats.converged;
        manifest << "level " << level << " ct term (" << t.pair.row << "," << t.pair.col
                 << ") sign " << (t.sign > 0 ? "+" : "-") << " size "
                 << h.size(level - t.pair.row) << "x" << h.size(level - t.pair.col)
                 << " iterations " << t.stats.iterations << " residual "
                 << fmt("%.3e", t.stats.final_relative_residual)
                 << (t.stats.converged ? "" : " NOT CONVERGED") << "\n";
      }
      row.error = relative_error(evaluate_combined(c, sample), ref);
      if (!row.all_converged && log)
        (*log) << "[study] level " << level << ": flagged non-convergent subproblem\n";
      result.ct.push_back(row);
    }
    if (run_tp) {
      if (log) (*log) << "[study] level " << level << ": full tensor-product solve\n";
      if (static_cast<long long>(n) * n > 20000000LL)
        throw NumericalError("study: full tensor-product grid would exceed 2e7 entries");
      DenseGrid f(n, n);
      for (const Vector& b : factors)
        for (int i = 0; i < n; ++i) {
          const double bi = b[i];
          double* fi = f.row(i);
          for (int j = 0; j < n; ++j) fi[j] += bi * b[j];
        }
      TensorProblem tp;
      tp.row_hierarchy = &h;
      tp.col_hierarchy = &h;
      tp.rhs = std::move(f);
      auto [x, stats] = tensor_solve(tp, cfg.tol, 200, cycle);
      Vector approx(sample.pairs.size());
      for (std::size_t s = 0; s < sample.pairs.size(); ++s)
        approx[s] = x(sample.pairs[s].first, sample.pairs[s].second);
      StudyRow row;
      row.level = level;
      row.n_unknowns = n;
      row.solve_time = stats.wall_time;
      row.all_converged = stats.converged;
      row.error = relative_error(approx, ref);
      manifest << "level " << level << " full_tp iterations " << stats.iterations << " residual "
               << fmt("%.3e", stats.final_relative_residual)
               << (stats.converged ? "" : " NOT CONVERGED") << "\n";
      result.full_tp.push_back(row);
    }
  }
  result.manifest = manifest.str();
  return result;
}

namespace {

void write_rows(const std::vector<StudyRow>& rows, const std::string& convergence_path,
                const std::string& timing_path) {
  std::ofstream conv(convergence_path);
  if (!conv) throw InputError("cannot write " + convergence_path);
  conv << "level,error\n";
  for (const StudyRow& r : rows) conv << r.level << "," << fmt("%.12g", r.error) << "\n";

  std::ofstream timing(timing_path);
  if (!timing) throw InputError("cannot write " + timing_path);
  timing << "N,time\n";
  for (const StudyRow& r : rows) timing << r.n_unknowns << "," << fmt("%.6g", r.solve_time) << "\n";
}

}  // namespace

void write_study_outputs(const StudyResult& result, const StudyConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  const std::filesystem::path dir(cfg.output_dir);
  if (!result.ct.empty())
    write_rows(result.ct, (dir / "convergence_ct.csv").string(),
               (dir / "timing_ct.csv").string());
  if (!result.full_tp.empty())
    write_rows(result.full_tp, (dir / "convergence_full_tp.csv").string(),
               (dir / "timing_full_tp.csv").string());
  std::ofstream manifest(dir / "manifest.txt");
  if (!manifest) throw InputError("cannot write manifest");
  manifest << result.manifest;
}

}  // namespace ctamg
