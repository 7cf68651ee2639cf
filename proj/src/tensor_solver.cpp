#include "ctamg/tensor_solver.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace ctamg {

namespace {

void gauss_seidel_forward(const SparseMatrix& a, const Vector& b, Vector& x) {
  for (int i = 0; i < a.n_rows; ++i) {
    double s = b[i];
    double diag = 0.0;
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      const int j = a.col_indices[k];
      if (j == i) diag = a.values[k];
      else s -= a.values[k] * x[j];
    }
    x[i] = s / diag;
  }
}

void gauss_seidel_backward(const SparseMatrix& a, const Vector& b, Vector& x) {
  for (int i = a.n_rows - 1; i >= 0; --i) {
    double s = b[i];
    double diag = 0.0;
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      const int j = a.col_indices[k];
      if (j == i) diag = a.values[k];
      else s -= a.values[k] * x[j];
    }
    x[i] = s / diag;
  }
}

void vcycle_inplace(const Hierarchy& h, int depth, const Vector& b, Vector& x,
                    const AmgCycleConfig& cfg) {
  if (depth == h.level_count() - 1) {
    x = h.coarse_solve(b);
    return;
  }
  const SparseMatrix& a = h.matrices[depth];
  const SparseMatrix& p = h.prolongations[depth];
  for (int s = 0; s < cfg.pre_smooth; ++s) gauss_seidel_forward(a, b, x);

  Vector r = spmv(a, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  Vector rc = spmv_transpose(p, r);
  Vector xc(rc.size(), 0.0);
  vcycle_inplace(h, depth + 1, rc, xc, cfg);
  const Vector corr = spmv(p, xc);
  axpy(1.0, corr, x);

  for (int s = 0; s < cfg.post_smooth; ++s) gauss_seidel_backward(a, b, x);
}

// R = F - A X B^T, streamed row by row so no extra grid is allocated
void residual(const SparseMatrix& a, const SparseMatrix& b, const DenseGrid& f,
              const DenseGrid& x, DenseGrid& r) {
  Vector tmp(x.n_cols);
  for (int i = 0; i < a.n_rows; ++i) {
    std::fill(tmp.begin(), tmp.end(), 0.0);
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      const double av = a.values[k];
      const double* xr = x.row(a.col_indices[k]);
      for (int j = 0; j < x.n_cols; ++j) tmp[j] += av * xr[j];
    }
    const double* fi = f.row(i);
    double* ri = r.row(i);
    for (int q = 0; q < b.n_rows; ++q) {
      double s = 0.0;
      for (int k = b.row_offsets[q]; k < b.row_offsets[q + 1]; ++k)
        s += tmp[b.col_indices[k]] * b.values[k];
      ri[q] = fi[q] - s;
    }
  }
}

}  // namespace

Vector amg_vcycle(const Hierarchy& h, int depth, const Vector& b, const Vector& x0,
                  const AmgCycleConfig& cfg) {
  if (depth < 0 || depth >= h.level_count())
    throw std::invalid_argument("amg_vcycle: depth out of range");
  if (static_cast<int>(b.size()) != h.size(depth) || b.size() != x0.size())
    throw std::invalid_argument("amg_vcycle: dimension mismatch");
  if (cfg.pre_smooth + cfg.post_smooth < 1)
    throw std::invalid_argument("amg_vcycle: need at least one smoothing sweep");
  Vector x = x0;
  vcycle_inplace(h, depth, b, x, cfg);
  return x;
}

std::pair<DenseGrid, SolveStats> tensor_solve(const TensorProblem& p, double tol, int max_it,
                                              const AmgCycleConfig& cfg) {
  if (tol <= 0.0) throw std::invalid_argument("tensor_solve: tol must be positive");
  const auto t0 = std::chrono::steady_clock::now();
  const SparseMatrix& a_row = p.row_hierarchy->matrices[p.row_depth];
  const SparseMatrix& a_col = p.col_hierarchy->matrices[p.col_depth];
  const int nr = a_row.n_rows, nc = a_col.n_rows;
  if (p.rhs.n_rows != nr || p.rhs.n_cols != nc)
    throw std::invalid_argument("tensor_solve: rhs dimension mismatch");

  SolveStats stats;
  DenseGrid x(nr, nc);
  const double fnorm = frobenius_norm(p.rhs);
  auto finish = [&](double rel) {
    stats.final_relative_residual = rel;
    stats.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return std::make_pair(std::move(x), stats);
  };
  if (fnorm == 0.0) return finish(0.0);

  DenseGrid r = p.rhs;
  double rel = 1.0;
  double prev_rel = rel;
  Vector col(nr), row_in(nc);
  for (int it = 0; it < max_it; ++it) {
    // V-cycle along the row direction, one solve per column of the grid
    for (int c = 0; c < nc; ++c) {
      for (int i = 0; i < nr; ++i) col[i] = r(i, c);
      Vector w(nr, 0.0);
      vcycle_inplace(*p.row_hierarchy, p.row_depth, col, w, cfg);
      for (int i = 0; i < nr; ++i) r(i, c) = w[i];
    }
    // then along the column direction, one solve per row
    for (int i = 0; i < nr; ++i) {
      double* ri = r.row(i);
      row_in.assign(ri, ri + nc);
      Vector w(nc, 0.0);
      vcycle_inplace(*p.col_hierarchy, p.col_depth, row_in, w, cfg);
      for (int j = 0; j < nc; ++j) ri[j] = w[j];
    }
    for (std::size_t k = 0; k < x.values.size(); ++k) x.values[k] += r.values[k];
    ++stats.iterations;

    residual(a_row, a_col, p.rhs, x, r);
    rel = frobenius_norm(r) / fnorm;
    if (it > 0 && rel > 1.1 * prev_rel) ++stats.non_monotone_steps;
    prev_rel = rel;
    if (rel <= tol) return finish(rel);
  }
  stats.converged = false;
  return finish(rel);
}

DenseGrid dense_kron_solve(const SparseMatrix& a, const SparseMatrix& b, const DenseGrid& f) {
  if (a.n_rows != a.n_cols || b.n_rows != b.n_cols)
    throw std::invalid_argument("dense_kron_solve: factors must be square");
  if (static_cast<long>(a.n_rows) * b.n_rows > 10000)
    throw std::invalid_argument("dense_kron_solve: combined dimension exceeds 10^4");
  if (f.n_rows != a.n_rows || f.n_cols != b.n_rows)
    throw std::invalid_argument("dense_kron_solve: rhs dimension mismatch");

  auto to_dense = [](const SparseMatrix& m) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m.n_rows, m.n_cols);
    for (int i = 0; i < m.n_rows; ++i)
      for (int k = m.row_offsets[i]; k < m.row_offsets[i + 1]; ++k)
        d(i, m.col_indices[k]) = m.values[k];
    return d;
  };
  Eigen::FullPivLU<Eigen::MatrixXd> lu_a(to_dense(a));
  Eigen::FullPivLU<Eigen::MatrixXd> lu_b(to_dense(b));
  if (!lu_a.isInvertible() || !lu_b.isInvertible())
    throw std::runtime_error("dense_kron_solve: singular factor");

  Eigen::MatrixXd fe(f.n_rows, f.n_cols);
  for (int i = 0; i < f.n_rows; ++i)
    for (int j = 0; j < f.n_cols; ++j) fe(i, j) = f(i, j);
  Eigen::MatrixXd y = lu_a.solve(fe);
  Eigen::MatrixXd z = lu_b.solve(y.transpose()).transpose();

  DenseGrid out(f.n_rows, f.n_cols);
  for (int i = 0; i < f.n_rows; ++i)
    for (int j = 0; j < f.n_cols; ++j) out(i, j) = z(i, j);
  return out;
}

std::pair<Vector, int> pcg(const SparseMatrix& a, const Vector& b, double tol, int max_it,
                           const std::function<Vector(const Vector&)>& precond) {
  Vector x(b.size(), 0.0);
  Vector r = b;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return {x, 0};
  Vector z = precond ? precond(r) : r;
  Vector p = z;
  double rz = dot(r, z);
  int it = 0;
  for (; it < max_it; ++it) {
    if (norm2(r) / bnorm <= tol) break;
    const Vector ap = spmv(a, p);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) break;  // semi-definite breakdown guard
    const double alpha = rz / pap;
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    z = precond ? precond(r) : r;
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
  }
  return {x, it};
}

}  // namespace ctamg
