#include "ctamg/combination.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>

namespace ctamg {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  const int count = std::min(jobs, n);
  workers.reserve(count);
  for (int w = 0; w < count; ++w)
    workers.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  for (auto& t : workers) t.join();
}

void check_level(const Hierarchy& h, int level) {
  if (level < 0 || level >= h.level_count())
    throw std::invalid_argument("combination: level " + std::to_string(level) +
                                " out of range for a hierarchy with " +
                                std::to_string(h.level_count()) + " levels");
}

}  // namespace

MultiIndexSet enumerate_indices(int level) {
  if (level < 0) throw std::invalid_argument("enumerate_indices: negative level");
  MultiIndexSet idx;
  idx.level = level;
  for (int j = 0; j <= level; ++j) idx.plus.push_back({j, level - j});
  for (int j = 0; j < level; ++j) idx.minus.push_back({j, level - 1 - j});
  return idx;
}

EvaluationSample make_evaluation_sample(int n_fine, int count, unsigned long long seed) {
  if (n_fine <= 0) throw std::invalid_argument("make_evaluation_sample: empty node range");
  EvaluationSample s;
  s.count = count;
  s.seed = seed;
  s.pairs.reserve(count);
  std::uint64_t counter = 0;
  auto draw = [&]() {
    // rejection keeps the draw unbiased and platform independent
    const std::uint64_t bound = (~0ULL / n_fine) * n_fine;
    while (true) {
      const std::uint64_t r = mix64(seed ^ mix64(++counter));
      if (r < bound) return static_cast<int>(r % n_fine);
    }
  };
  for (int i = 0; i < count; ++i) {
    const int a = draw();
    const int b = draw();
    s.pairs.emplace_back(a, b);
  }
  return s;
}

DenseGrid subproblem_rhs(const DenseGrid& f_fine, const Hierarchy& h, int level,
                         const LevelPair& pair) {
  check_level(h, level);
  if (pair.row < 0 || pair.row > level || pair.col < 0 || pair.col > level)
    throw std::invalid_argument("subproblem_rhs: level pair out of range");
  if (f_fine.n_rows != h.size(0) || f_fine.n_cols != h.size(0))
    throw std::invalid_argument("subproblem_rhs: rhs is not fine x fine");
  const SparseMatrix pr = compose_prolongation(h, level - pair.row, 0);
  const SparseMatrix pc = compose_prolongation(h, level - pair.col, 0);
  return sparse_transpose_dense(pr, dense_sparse(f_fine, pc));
}

Vector tensor_load_constant_factor(const AssembledProblem& problem) {
  return spmv(problem.mass, Vector(problem.n_interior(), 1.0));
}

DenseGrid tensor_load_constant(const AssembledProblem& problem) {
  const Vector b = tensor_load_constant_factor(problem);
  const int n = static_cast<int>(b.size());
  DenseGrid f(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f(i, j) = b[i] * b[j];
  return f;
}

std::function<Vector(int)> gaussian_kernel_row(const AssembledProblem& problem,
                                               double corr_length) {
  if (!(corr_length > 0.0))
    throw std::invalid_argument("gaussian_kernel_row: correlation length must be positive");
  std::vector<Point> coords(problem.n_interior());
  for (int i = 0; i < problem.n_interior(); ++i) coords[i] = problem.interior_coord(i);
  return [coords = std::move(coords), corr_length](int i) {
    Vector row(coords.size());
    const Point xi = coords[i];
    for (std::size_t k = 0; k < coords.size(); ++k) {
      const double dx = xi.x - coords[k].x;
      const double dy = xi.y - coords[k].y;
      row[k] = std::exp(-(dx * dx + dy * dy) / corr_length);
    }
    return row;
  };
}

DenseGrid tensor_load_kernel(const AssembledProblem& problem, double corr_length) {
  const int n = problem.n_interior();
  if (n > 20000)
    throw std::runtime_error("tensor_load_kernel: kernel too large to form densely");
  const auto row = gaussian_kernel_row(problem, corr_length);
  DenseGrid k(n, n);
  for (int i = 0; i < n; ++i) {
    const Vector r = row(i);
    std::copy(r.begin(), r.end(), k.row(i));
  }
  return sparse_dense(problem.mass, dense_sparse_transpose(k, problem.mass));
}

LowRankFactor pivoted_cholesky(const Vector& diag, const std::function<Vector(int)>& kernel_row,
                               double tol_trace, int max_rank) {
  const int n = static_cast<int>(diag.size());
  LowRankFactor lr;
  Vector d = diag;
  double initial_trace = 0.0;
  for (double v : d) initial_trace += v;
  if (initial_trace <= 0.0) return lr;

  double trace = initial_trace;
  while (lr.rank < max_rank && trace > tol_trace * initial_trace) {
    int pivot = 0;
    for (int i = 1; i < n; ++i)
      if (d[i] > d[pivot]) pivot = i;  // ties keep the lowest index
    if (d[pivot] < -1e-12 * initial_trace)
      throw std::runtime_error("pivoted_cholesky: kernel is not positive semidefinite");
    if (d[pivot] <= 0.0) break;

    Vector col = kernel_row(pivot);
    for (const Vector& prev : lr.columns) axpy(-prev[pivot], prev, col);
    const double scale = 1.0 / std::sqrt(d[pivot]);
    for (double& v : col) v *= scale;

    trace = 0.0;
    for (int i = 0; i < n; ++i) {
      d[i] -= col[i] * col[i];
      trace += d[i];
    }
    lr.columns.push_back(std::move(col));
    ++lr.rank;
  }
  lr.trace_error = std::max(trace, 0.0);
  lr.hit_max_rank = lr.rank >= max_rank && trace > tol_trace * initial_trace;
  return lr;
}

namespace {

CombinedSolution solve_terms(const Hierarchy& h, const MultiIndexSet& idx, double tol,
                             const AmgCycleConfig& cfg, int max_it, int jobs,
                             const std::function<DenseGrid(const LevelPair&)>& make_rhs) {
  check_level(h, idx.level);
  CombinedSolution c;
  c.hierarchy = &h;
  c.level = idx.level;
  for (const LevelPair& p : idx.plus) c.terms.push_back({+1, p, {}, {}});
  for (const LevelPair& p : idx.minus) c.terms.push_back({-1, p, {}, {}});
  std::sort(c.terms.begin(), c.terms.end(), [](const CombinedTerm& a, const CombinedTerm& b) {
    return a.pair < b.pair || (a.pair == b.pair && a.sign > b.sign);
  });

  parallel_for(static_cast<int>(c.terms.size()), jobs, [&](int t) {
    CombinedTerm& term = c.terms[t];
    TensorProblem p;
    p.row_hierarchy = &h;
    p.col_hierarchy = &h;
    p.row_depth = idx.level - term.pair.row;
    p.col_depth = idx.level - term.pair.col;
    p.rhs = make_rhs(term.pair);
    auto [x, stats] = tensor_solve(p, tol, max_it, cfg);
    term.solution = std::move(x);
    term.stats = stats;
  });
  return c;
}

}  // namespace

CombinedSolution solve_all(const DenseGrid& f_fine, const Hierarchy& h,
                           const MultiIndexSet& idx, double tol, const AmgCycleConfig& cfg,
                           int max_it, int jobs) {
  return solve_terms(h, idx, tol, cfg, max_it, jobs, [&](const LevelPair& pair) {
    return subproblem_rhs(f_fine, h, idx.level, pair);
  });
}

CombinedSolution solve_all_factored(const std::vector<Vector>& factors, const Hierarchy& h,
                                    const MultiIndexSet& idx, double tol,
                                    const AmgCycleConfig& cfg, int max_it, int jobs) {
  check_level(h, idx.level);
  // restrict each factor once per depth, then assemble the small grids
  std::vector<std::vector<Vector>> restricted(idx.level + 1);
  for (int j = 0; j <= idx.level; ++j) {
    const int depth = idx.level - j;
    restricted[j].reserve(factors.size());
    for (const Vector& b : factors) {
      Vector v = b;
      for (int d = 0; d < depth; ++d) v = spmv_transpose(h.prolongations[d], v);
      restricted[j].push_back(std::move(v));
    }
  }
  return solve_terms(h, idx, tol, cfg, max_it, jobs, [&](const LevelPair& pair) {
    const auto& rows = restricted[pair.row];
    const auto& cols = restricted[pair.col];
    const int nr = static_cast<int>(rows.front().size());
    const int nc = static_cast<int>(cols.front().size());
    DenseGrid f(nr, nc);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (int i = 0; i < nr; ++i) {
        const double ri = rows[r][i];
        if (ri == 0.0) continue;
        const double* cv = cols[r].data();
        double* fi = f.row(i);
        for (int j = 0; j < nc; ++j) fi[j] += ri * cv[j];
      }
    return f;
  });
}

Vector evaluate_combined(const CombinedSolution& c, const EvaluationSample& sample) {
  const Hierarchy& h = *c.hierarchy;
  std::vector<SparseMatrix> composed(c.level + 1);
  for (int d = 0; d <= c.level; ++d) composed[d] = compose_prolongation(h, d, 0);

  Vector out(sample.pairs.size(), 0.0);
  for (const CombinedTerm& term : c.terms) {
    const SparseMatrix& pr = composed[c.level - term.pair.row];
    const SparseMatrix& pc = composed[c.level - term.pair.col];
    const DenseGrid& x = term.solution;
    for (std::size_t s = 0; s < sample.pairs.size(); ++s) {
      const auto [a, b] = sample.pairs[s];
      double v = 0.0;
      for (int ka = pr.row_offsets[a]; ka < pr.row_offsets[a + 1]; ++ka) {
        const double* xr = x.row(pr.col_indices[ka]);
        double inner = 0.0;
        for (int kb = pc.row_offsets[b]; kb < pc.row_offsets[b + 1]; ++kb)
          inner += xr[pc.col_indices[kb]] * pc.values[kb];
        v += pr.values[ka] * inner;
      }
      out[s] += term.sign * v;
    }
  }
  return out;
}

double relative_error(const Vector& approx, const Vector& ref) {
  if (approx.size() != ref.size())
    throw std::invalid_argument("relative_error: length mismatch");
  const double rn = norm2(ref);
  if (rn == 0.0) throw std::invalid_argument("relative_error: zero reference norm");
  Vector diff = approx;
  axpy(-1.0, ref, diff);
  return norm2(diff) / rn;
}

Vector reference_disk(const EvaluationSample& sample, const AssembledProblem& problem) {
  auto factor = [&](int i) {
    const Point p = problem.interior_coord(i);
    return p.x * p.x + p.y * p.y - 0.25;
  };
  Vector out(sample.pairs.size());
  for (std::size_t s = 0; s < sample.pairs.size(); ++s)
    out[s] = factor(sample.pairs[s].first) * factor(sample.pairs[s].second) / 16.0;
  return out;
}

Vector reference_lowrank(const AssembledProblem& problem, const Hierarchy& h,
                         const LowRankFactor& lr, const EvaluationSample& sample,
                         double univariate_tol) {
  const AmgCycleConfig cfg;
  auto precond = [&](const Vector& r) { return amg_vcycle(h, 0, r, Vector(r.size(), 0.0), cfg); };
  std::vector<Vector> w;
  w.reserve(lr.columns.size());
  for (const Vector& col : lr.columns) {
    const Vector rhs = spmv(problem.mass, col);
    auto [sol, iters] = pcg(problem.stiffness, rhs, univariate_tol, 2000, precond);
    Vector residual = spmv(problem.stiffness, sol);
    axpy(-1.0, rhs, residual);
    const double rhs_norm = norm2(rhs);
    if (rhs_norm > 0.0 && norm2(residual) / rhs_norm > 10.0 * univariate_tol)
      throw std::runtime_error("reference_lowrank: univariate solve did not converge");
    (void)iters;
    w.push_back(std::move(sol));
  }
  Vector out(sample.pairs.size(), 0.0);
  for (std::size_t s = 0; s < sample.pairs.size(); ++s) {
    const auto [a, b] = sample.pairs[s];
    for (const Vector& wr : w) out[s] += wr[a] * wr[b];
  }
  return out;
}

}  // namespace ctamg
