#ifndef CTAMG_SPARSE_HPP
#define CTAMG_SPARSE_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace ctamg {

using Vector = std::vector<double>;

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row; duplicates are forbidden.
struct SparseMatrix {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<int> row_offsets;  // length n_rows+1, row_offsets[0] == 0
  std::vector<int> col_indices;
  std::vector<double> values;

  SparseMatrix() : row_offsets(1, 0) {}
  SparseMatrix(int rows, int cols)
      : n_rows(rows), n_cols(cols), row_offsets(rows + 1, 0) {}

  int nnz() const { return static_cast<int>(values.size()); }
  int row_nnz(int i) const { return row_offsets[i + 1] - row_offsets[i]; }

  /// Entry lookup by binary search; zero if not stored.
  double at(int i, int j) const;

  /// Checks the CSR invariants, throws std::invalid_argument on violation.
  void check() const;

  static SparseMatrix identity(int n);

  /// Builds a matrix from (row, col, value) triplets. Duplicates are summed;
  /// entries that sum to exactly 0.0 are dropped when drop_zeros is set.
  static SparseMatrix from_triplets(int rows, int cols,
                                    std::vector<int> ti, std::vector<int> tj,
                                    std::vector<double> tv,
                                    bool drop_zeros = false);
};

/// Dense row-major matrix used for reshaped tensor iterates.
struct DenseGrid {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<double> values;

  DenseGrid() = default;
  DenseGrid(int rows, int cols)
      : n_rows(rows), n_cols(cols),
        values(static_cast<std::size_t>(rows) * cols, 0.0) {}

  double& operator()(int i, int j) { return values[static_cast<std::size_t>(i) * n_cols + j]; }
  double operator()(int i, int j) const { return values[static_cast<std::size_t>(i) * n_cols + j]; }
  double* row(int i) { return values.data() + static_cast<std::size_t>(i) * n_cols; }
  const double* row(int i) const { return values.data() + static_cast<std::size_t>(i) * n_cols; }
};

// -- vector helpers -----------------------------------------------------

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
void axpy(double alpha, const Vector& x, Vector& y);  // y += alpha*x

double frobenius_norm(const DenseGrid& g);

// -- sparse kernels -----------------------------------------------------

/// y = A*x
Vector spmv(const SparseMatrix& a, const Vector& x);

/// y = A^T*x
Vector spmv_transpose(const SparseMatrix& a, const Vector& x);

SparseMatrix transpose(const SparseMatrix& a);

/// C = A*B with duplicates merged; entries cancelling to exactly 0.0 are
/// dropped so Galerkin sparsity patterns stay reproducible.
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);

/// R*A*P, the Galerkin triple product.
SparseMatrix triple_product(const SparseMatrix& r, const SparseMatrix& a,
                            const SparseMatrix& p);

/// (A (x) B) x without forming the Kronecker product: x is reshaped to an
/// A.n_cols x B.n_cols grid X, the result is A*X*B^T flattened row-major.
/// The first factor indexes the outer blocks of the Kronecker layout.
Vector kron_apply(const SparseMatrix& a, const SparseMatrix& b, const Vector& x);

// -- dense grid kernels -------------------------------------------------

/// C = A*X  (sparse times dense)
DenseGrid sparse_dense(const SparseMatrix& a, const DenseGrid& x);

/// C = A^T*X
DenseGrid sparse_transpose_dense(const SparseMatrix& a, const DenseGrid& x);

/// C = X*B^T
DenseGrid dense_sparse_transpose(const DenseGrid& x, const SparseMatrix& b);

/// C = X*B
DenseGrid dense_sparse(const DenseGrid& x, const SparseMatrix& b);

// -- Matrix Market I/O --------------------------------------------------

/// Reads a coordinate-format real matrix ("general" or "symmetric"; a
/// symmetric file is materialized in full). Throws std::runtime_error with
/// the offending line number on parse errors.
SparseMatrix read_matrix_market(const std::string& path);

/// Writes coordinate format with 1-based indices, symmetry field "general".
void write_matrix_market(const SparseMatrix& a, const std::string& path);

}  // namespace ctamg

#endif
