#include "ctamg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ctamg {

double SparseMatrix::at(int i, int j) const {
  const int* first = col_indices.data() + row_offsets[i];
  const int* last = col_indices.data() + row_offsets[i + 1];
  const int* it = std::lower_bound(first, last, j);
  if (it != last && *it == j) return values[it - col_indices.data()];
  return 0.0;
}

void SparseMatrix::check() const {
  if (n_rows < 0 || n_cols < 0)
    throw std::invalid_argument("SparseMatrix: negative dimension");
  if (static_cast<int>(row_offsets.size()) != n_rows + 1 || row_offsets[0] != 0)
    throw std::invalid_argument("SparseMatrix: bad row_offsets");
  if (row_offsets[n_rows] != nnz() || col_indices.size() != values.size())
    throw std::invalid_argument("SparseMatrix: offsets/values mismatch");
  for (int i = 0; i < n_rows; ++i) {
    if (row_offsets[i] > row_offsets[i + 1])
      throw std::invalid_argument("SparseMatrix: decreasing row_offsets");
    for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      if (col_indices[k] < 0 || col_indices[k] >= n_cols)
        throw std::invalid_argument("SparseMatrix: column index out of range");
      if (k > row_offsets[i] && col_indices[k] <= col_indices[k - 1])
        throw std::invalid_argument("SparseMatrix: columns not strictly increasing");
    }
  }
}

SparseMatrix SparseMatrix::identity(int n) {
  SparseMatrix a(n, n);
  a.col_indices.resize(n);
  a.values.assign(n, 1.0);
  std::iota(a.col_indices.begin(), a.col_indices.end(), 0);
  std::iota(a.row_offsets.begin(), a.row_offsets.end(), 0);
  return a;
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols,
                                         std::vector<int> ti, std::vector<int> tj,
                                         std::vector<double> tv, bool drop_zeros) {
  if (ti.size() != tj.size() || ti.size() != tv.size())
    throw std::invalid_argument("from_triplets: length mismatch");
  const std::size_t m = ti.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (ti[a] != ti[b]) return ti[a] < ti[b];
    if (tj[a] != tj[b]) return tj[a] < tj[b];
    return a < b;  // stable within an entry so summation order is fixed
  });

  SparseMatrix a(rows, cols);
  a.col_indices.reserve(m);
  a.values.reserve(m);
  std::size_t k = 0;
  for (int i = 0; i < rows; ++i) {
    while (k < m && ti[order[k]] == i) {
      const int j = tj[order[k]];
      if (j < 0 || j >= cols || i < 0)
        throw std::invalid_argument("from_triplets: index out of range");
      double v = tv[order[k]];
      ++k;
      while (k < m && ti[order[k]] == i && tj[order[k]] == j) {
        v += tv[order[k]];
        ++k;
      }
      if (drop_zeros && v == 0.0) continue;
      a.col_indices.push_back(j);
      a.values.push_back(v);
    }
    a.row_offsets[i + 1] = static_cast<int>(a.values.size());
  }
  if (k != m) throw std::invalid_argument("from_triplets: row index out of range");
  return a;
}

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const Vector& x, Vector& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double frobenius_norm(const DenseGrid& g) {
  double s = 0.0;
  for (double v : g.values) s += v * v;
  return std::sqrt(s);
}

Vector spmv(const SparseMatrix& a, const Vector& x) {
  if (static_cast<int>(x.size()) != a.n_cols)
    throw std::invalid_argument("spmv: dimension mismatch");
  Vector y(a.n_rows, 0.0);
  for (int i = 0; i < a.n_rows; ++i) {
    double s = 0.0;
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
      s += a.values[k] * x[a.col_indices[k]];
    y[i] = s;
  }
  return y;
}

Vector spmv_transpose(const SparseMatrix& a, const Vector& x) {
  if (static_cast<int>(x.size()) != a.n_rows)
    throw std::invalid_argument("spmv_transpose: dimension mismatch");
  Vector y(a.n_cols, 0.0);
  for (int i = 0; i < a.n_rows; ++i)
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
      y[a.col_indices[k]] += a.values[k] * x[i];
  return y;
}

SparseMatrix transpose(const SparseMatrix& a) {
  SparseMatrix t(a.n_cols, a.n_rows);
  std::vector<int> count(a.n_cols, 0);
  for (int c : a.col_indices) ++count[c];
  for (int j = 0; j < a.n_cols; ++j) t.row_offsets[j + 1] = t.row_offsets[j] + count[j];
  t.col_indices.resize(a.nnz());
  t.values.resize(a.nnz());
  std::vector<int> next(t.row_offsets.begin(), t.row_offsets.end() - 1);
  for (int i = 0; i < a.n_rows; ++i)
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      const int pos = next[a.col_indices[k]]++;
      t.col_indices[pos] = i;
      t.values[pos] = a.values[k];
    }
  return t;  // columns sorted because rows of a are visited in order
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.n_cols != b.n_rows)
    throw std::invalid_argument("multiply: dimension mismatch");
  SparseMatrix c(a.n_rows, b.n_cols);
  std::vector<double> acc(b.n_cols, 0.0);
  std::vector<int> marker(b.n_cols, -1);
  std::vector<int> cols;
  cols.reserve(64);
  for (int i = 0; i < a.n_rows; ++i) {
    cols.clear();
    for (int ka = a.row_offsets[i]; ka < a.row_offsets[i + 1]; ++ka) {
      const int j = a.col_indices[ka];
      const double av = a.values[ka];
      for (int kb = b.row_offsets[j]; kb < b.row_offsets[j + 1]; ++kb) {
        const int col = b.col_indices[kb];
        if (marker[col] != i) {
          marker[col] = i;
          acc[col] = 0.0;
          cols.push_back(col);
        }
        acc[col] += av * b.values[kb];
      }
    }
    std::sort(cols.begin(), cols.end());
    for (int col : cols) {
      if (acc[col] == 0.0) continue;  // exact cancellation
      c.col_indices.push_back(col);
      c.values.push_back(acc[col]);
    }
    c.row_offsets[i + 1] = static_cast<int>(c.values.size());
  }
  return c;
}

SparseMatrix triple_product(const SparseMatrix& r, const SparseMatrix& a,
                            const SparseMatrix& p) {
  if (r.n_cols != a.n_rows || a.n_cols != p.n_rows)
    throw std::invalid_argument("triple_product: dimension mismatch");
  return multiply(multiply(r, a), p);
}

Vector kron_apply(const SparseMatrix& a, const SparseMatrix& b, const Vector& x) {
  if (static_cast<std::size_t>(a.n_cols) * b.n_cols != x.size())
    throw std::invalid_argument("kron_apply: dimension mismatch");
  DenseGrid gx(a.n_cols, b.n_cols);
  gx.values = x;
  DenseGrid y = dense_sparse_transpose(sparse_dense(a, gx), b);
  return y.values;
}

DenseGrid sparse_dense(const SparseMatrix& a, const DenseGrid& x) {
  if (a.n_cols != x.n_rows)
    throw std::invalid_argument("sparse_dense: dimension mismatch");
  DenseGrid c(a.n_rows, x.n_cols);
  for (int i = 0; i < a.n_rows; ++i) {
    double* ci = c.row(i);
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      const double av = a.values[k];
      const double* xr = x.row(a.col_indices[k]);
      for (int j = 0; j < x.n_cols; ++j) ci[j] += av * xr[j];
    }
  }
  return c;
}

DenseGrid sparse_transpose_dense(const SparseMatrix& a, const DenseGrid& x) {
  if (a.n_rows != x.n_rows)
    throw std::invalid_argument("sparse_transpose_dense: dimension mismatch");
  DenseGrid c(a.n_cols, x.n_cols);
  for (int i = 0; i < a.n_rows; ++i) {
    const double* xi = x.row(i);
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      double* cr = c.row(a.col_indices[k]);
      const double av = a.values[k];
      for (int j = 0; j < x.n_cols; ++j) cr[j] += av * xi[j];
    }
  }
  return c;
}

DenseGrid dense_sparse_transpose(const DenseGrid& x, const SparseMatrix& b) {
  if (x.n_cols != b.n_cols)
    throw std::invalid_argument("dense_sparse_transpose: dimension mismatch");
  DenseGrid c(x.n_rows, b.n_rows);
  for (int i = 0; i < x.n_rows; ++i) {
    const double* xi = x.row(i);
    double* ci = c.row(i);
    for (int q = 0; q < b.n_rows; ++q) {
      double s = 0.0;
      for (int k = b.row_offsets[q]; k < b.row_offsets[q + 1]; ++k)
        s += xi[b.col_indices[k]] * b.values[k];
      ci[q] = s;
    }
  }
  return c;
}

DenseGrid dense_sparse(const DenseGrid& x, const SparseMatrix& b) {
  if (x.n_cols != b.n_rows)
    throw std::invalid_argument("dense_sparse: dimension mismatch");
  DenseGrid c(x.n_rows, b.n_cols);
  for (int i = 0; i < x.n_rows; ++i) {
    const double* xi = x.row(i);
    double* ci = c.row(i);
    for (int k = 0; k < b.n_rows; ++k) {
      const double xv = xi[k];
      if (xv == 0.0) continue;
      for (int kk = b.row_offsets[k]; kk < b.row_offsets[k + 1]; ++kk)
        ci[b.col_indices[kk]] += xv * b.values[kk];
    }
  }
  return c;
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

SparseMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  int lineno = 0;

  if (!std::getline(in, line)) parse_fail(path, 1, "empty file");
  ++lineno;
  std::istringstream hdr(line);
  std::string banner, object, format, field, symmetry;
  hdr >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || object != "matrix" || format != "coordinate")
    parse_fail(path, lineno, "bad Matrix Market header");
  if (field != "real")
    parse_fail(path, lineno, "unsupported field: " + field);
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general")
    parse_fail(path, lineno, "unsupported symmetry: " + symmetry);

  int rows = 0, cols = 0;
  long declared = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    std::istringstream sz(line);
    if (!(sz >> rows >> cols >> declared))
      parse_fail(path, lineno, "bad size line");
    break;
  }
  if (declared < 0) parse_fail(path, lineno, "missing size line");

  std::vector<int> ti, tj;
  std::vector<double> tv;
  ti.reserve(declared);
  tj.reserve(declared);
  tv.reserve(declared);
  long seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream es(line);
    int i, j;
    double v;
    if (!(es >> i >> j >> v)) parse_fail(path, lineno, "bad entry");
    if (i < 1 || i > rows || j < 1 || j > cols)
      parse_fail(path, lineno, "entry index out of range");
    ti.push_back(i - 1);
    tj.push_back(j - 1);
    tv.push_back(v);
    if (symmetric && i != j) {
      ti.push_back(j - 1);
      tj.push_back(i - 1);
      tv.push_back(v);
    }
    ++seen;
  }
  if (seen != declared)
    parse_fail(path, lineno, "declared " + std::to_string(declared) + " entries, found " +
                                 std::to_string(seen));
  return SparseMatrix::from_triplets(rows, cols, std::move(ti), std::move(tj), std::move(tv));
}

void write_matrix_market(const SparseMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.n_rows << " " << a.n_cols << " " << a.nnz() << "\n";
  char buf[64];
  for (int i = 0; i < a.n_rows; ++i)
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", i + 1, a.col_indices[k] + 1, a.values[k]);
      out << buf;
    }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace ctamg
