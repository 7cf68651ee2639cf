#ifndef CTAMG_TEST_HELPERS_HPP
#define CTAMG_TEST_HELPERS_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "ctamg/sparse.hpp"

namespace ctamg::testing {

// tridiag(off, diag, off) of size n
inline SparseMatrix tridiag(int n, double diag = 2.0, double off = -1.0) {
  std::vector<int> ti, tj;
  std::vector<double> tv;
  for (int i = 0; i < n; ++i) {
    ti.push_back(i);
    tj.push_back(i);
    tv.push_back(diag);
    if (i > 0) {
      ti.push_back(i);
      tj.push_back(i - 1);
      tv.push_back(off);
    }
    if (i + 1 < n) {
      ti.push_back(i);
      tj.push_back(i + 1);
      tv.push_back(off);
    }
  }
  return SparseMatrix::from_triplets(n, n, ti, tj, tv);
}

// graph Laplacian of a path: zero row sums, singular
inline SparseMatrix path_laplacian(int n) {
  std::vector<int> ti, tj;
  std::vector<double> tv;
  for (int i = 0; i < n; ++i) {
    double d = 0.0;
    if (i > 0) {
      ti.push_back(i);
      tj.push_back(i - 1);
      tv.push_back(-1.0);
      d += 1.0;
    }
    if (i + 1 < n) {
      ti.push_back(i);
      tj.push_back(i + 1);
      tv.push_back(-1.0);
      d += 1.0;
    }
    ti.push_back(i);
    tj.push_back(i);
    tv.push_back(d);
  }
  return SparseMatrix::from_triplets(n, n, ti, tj, tv);
}

// graph Laplacian of an nx-by-ny grid: zero row sums
inline SparseMatrix grid_laplacian(int nx, int ny) {
  auto id = [nx](int i, int j) { return j * nx + i; };
  std::vector<int> ti, tj;
  std::vector<double> tv;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      double d = 0.0;
      auto link = [&](int a, int b) {
        ti.push_back(a);
        tj.push_back(b);
        tv.push_back(-1.0);
        d += 1.0;
      };
      if (i > 0) link(id(i, j), id(i - 1, j));
      if (i + 1 < nx) link(id(i, j), id(i + 1, j));
      if (j > 0) link(id(i, j), id(i, j - 1));
      if (j + 1 < ny) link(id(i, j), id(i, j + 1));
      ti.push_back(id(i, j));
      tj.push_back(id(i, j));
      tv.push_back(d);
    }
  return SparseMatrix::from_triplets(nx * ny, nx * ny, ti, tj, tv);
}

// 5-point Laplacian (Dirichlet) on an nx-by-ny interior grid
inline SparseMatrix dirichlet_laplacian_2d(int nx, int ny) {
  auto id = [nx](int i, int j) { return j * nx + i; };
  std::vector<int> ti, tj;
  std::vector<double> tv;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      ti.push_back(id(i, j));
      tj.push_back(id(i, j));
      tv.push_back(4.0);
      auto link = [&](int a, int b) {
        ti.push_back(a);
        tj.push_back(b);
        tv.push_back(-1.0);
      };
      if (i > 0) link(id(i, j), id(i - 1, j));
      if (i + 1 < nx) link(id(i, j), id(i + 1, j));
      if (j > 0) link(id(i, j), id(i, j - 1));
      if (j + 1 < ny) link(id(i, j), id(i, j + 1));
    }
  return SparseMatrix::from_triplets(nx * ny, nx * ny, ti, tj, tv);
}

inline Eigen::MatrixXd to_dense(const SparseMatrix& a) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(a.n_rows, a.n_cols);
  for (int i = 0; i < a.n_rows; ++i)
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
      d(i, a.col_indices[k]) = a.values[k];
  return d;
}

inline Eigen::MatrixXd to_dense(const DenseGrid& g) {
  Eigen::MatrixXd d(g.n_rows, g.n_cols);
  for (int i = 0; i < g.n_rows; ++i)
    for (int j = 0; j < g.n_cols; ++j) d(i, j) = g(i, j);
  return d;
}

// deterministic pseudo-random stream for test data
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t x = state;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  int below(int n) { return static_cast<int>(next() % n); }
};

// random sparse matrix with ~density fraction of entries
inline SparseMatrix random_sparse(int rows, int cols, double density, Rng& rng) {
  std::vector<int> ti, tj;
  std::vector<double> tv;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (rng.uniform() < density) {
        ti.push_back(i);
        tj.push_back(j);
        tv.push_back(rng.uniform() * 2.0 - 1.0);
      }
  return SparseMatrix::from_triplets(rows, cols, ti, tj, tv);
}

// random symmetric positive definite matrix as a dense-backed sparse m
inline SparseMatrix random_spd(int n, Rng& rng) {
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = rng.uniform() - 0.5;
  Eigen::MatrixXd s = b * b.transpose() + n * Eigen::MatrixXd::Identity(n, n);
  std::vector<int> ti, tj;
  std::vector<double> tv;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ti.push_back(i);
      tj.push_back(j);
      tv.push_back(s(i, j));
    }
  return SparseMatrix::from_triplets(n, n, ti, tj, tv);
}

}  // namespace ctamg::testing

#endif
