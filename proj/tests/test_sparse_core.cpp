#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ctamg/sparse.hpp"
#include "test_helpers.hpp"

using namespace ctamg;
using testing::Rng;
using testing::to_dense;
using testing::tridiag;

TEST_CASE("spmv basics") {
  const SparseMatrix id3 = SparseMatrix::identity(3);
  CHECK(spmv(id3, {1.0, 2.0, 3.0}) == Vector{1.0, 2.0, 3.0});

  const SparseMatrix t3 = tridiag(3);
  const Vector y = spmv(t3, {1.0, 1.0, 1.0});
  CHECK(y[0] == doctest::Approx(1.0));
  CHECK(y[1] == doctest::Approx(0.0));
  CHECK(y[2] == doctest::Approx(1.0));

  CHECK(spmv(t3, {0.0, 0.0, 0.0}) == Vector{0.0, 0.0, 0.0});
  CHECK_THROWS_AS(spmv(t3, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("spmv is linear") {
  Rng rng(11);
  const SparseMatrix a = testing::random_sparse(7, 9, 0.4, rng);
  Vector x(9), y(9);
  for (int i = 0; i < 9; ++i) {
    x[i] = rng.uniform() - 0.5;
    y[i] = rng.uniform() - 0.5;
  }
  const double alpha = 0.7, beta = -1.3;
  Vector combo(9);
  for (int i = 0; i < 9; ++i) combo[i] = alpha * x[i] + beta * y[i];
  const Vector lhs = spmv(a, combo);
  Vector rhs = spmv(a, x);
  for (double& v : rhs) v *= alpha;
  axpy(beta, spmv(a, y), rhs);
  for (int i = 0; i < 7; ++i) CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-12));
}

TEST_CASE("transpose") {
  const SparseMatrix t3 = tridiag(3);
  const SparseMatrix t3t = transpose(t3);
  CHECK(to_dense(t3) == to_dense(t3t));

  SparseMatrix a = SparseMatrix::from_triplets(2, 3, {0}, {2}, {5.0});
  const SparseMatrix at = transpose(a);
  CHECK(at.n_rows == 3);
  CHECK(at.n_cols == 2);
  CHECK(at.at(2, 0) == 5.0);
  CHECK(at.nnz() == 1);

  Rng rng(5);
  const SparseMatrix r = testing::random_sparse(6, 8, 0.3, rng);
  CHECK(to_dense(transpose(transpose(r))) == to_dense(r));
  r.check();
  transpose(r).check();
}

TEST_CASE("triple product") {
  const SparseMatrix a = tridiag(5);
  SUBCASE("identity leaves the matrix unchanged") {
    const SparseMatrix id = SparseMatrix::identity(5);
    const SparseMatrix c = triple_product(id, a, id);
    CHECK(to_dense(c) == to_dense(a));
  }
  SUBCASE("1d coarse operator from linear interpolation") {
    // C = {1,3}; fine rows interpolate from their coarse neighbors
    const SparseMatrix p = SparseMatrix::from_triplets(
        5, 2, {0, 1, 2, 2, 3, 4}, {0, 0, 0, 1, 1, 1}, {0.5, 1.0, 0.5, 0.5, 1.0, 0.5});
    const SparseMatrix c = triple_product(transpose(p), a, p);
    CHECK(c.n_rows == 2);
    CHECK(c.at(0, 0) == doctest::Approx(1.0));
    CHECK(c.at(0, 1) == doctest::Approx(-0.5));
    CHECK(c.at(1, 0) == doctest::Approx(-0.5));
    CHECK(c.at(1, 1) == doctest::Approx(1.0));
  }
  SUBCASE("matches dense evaluation on random instances") {
    Rng rng(17);
    for (int trial = 0; trial < 8; ++trial) {
      const SparseMatrix r = testing::random_sparse(8, 8, 0.35, rng);
      const SparseMatrix m = testing::random_sparse(8, 8, 0.35, rng);
      const SparseMatrix p = testing::random_sparse(8, 8, 0.35, rng);
      const Eigen::MatrixXd expect = to_dense(r) * to_dense(m) * to_dense(p);
      const Eigen::MatrixXd got = to_dense(triple_product(r, m, p));
      CHECK((expect - got).norm() <= 1e-12 * (1.0 + expect.norm()));
    }
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(triple_product(SparseMatrix::identity(4), a, SparseMatrix::identity(5)),
                    std::invalid_argument);
  }
}

TEST_CASE("exact cancellation is dropped") {
  // rows of b cancel exactly when combined with (1, 1)
  const SparseMatrix a = SparseMatrix::from_triplets(1, 2, {0, 0}, {0, 1}, {1.0, 1.0});
  const SparseMatrix b = SparseMatrix::from_triplets(2, 1, {0, 1}, {0, 0}, {1.0, -1.0});
  const SparseMatrix c = multiply(a, b);
  CHECK(c.nnz() == 0);
}

TEST_CASE("kron_apply") {
  SUBCASE("identity") {
    const SparseMatrix i2 = SparseMatrix::identity(2);
    const Vector x = {1.0, 2.0, 3.0, 4.0};
    CHECK(kron_apply(i2, i2, x) == x);
  }
  SUBCASE("block layout follows the first factor") {
    const SparseMatrix a = tridiag(2);  // [[2,-1],[-1,2]]
    const SparseMatrix i2 = SparseMatrix::identity(2);
    const Vector y = kron_apply(a, i2, {1.0, 0.0, 0.0, 0.0});
    CHECK(y == Vector{2.0, 0.0, -1.0, 0.0});
  }
  SUBCASE("matches the dense Kronecker matrix") {
    Rng rng(23);
    for (int trial = 0; trial < 6; ++trial) {
      const SparseMatrix a = testing::random_sparse(3, 3, 0.6, rng);
      const SparseMatrix b = testing::random_sparse(4, 4, 0.6, rng);
      Vector x(12);
      for (double& v : x) v = rng.uniform() - 0.5;
      const Eigen::MatrixXd ad = to_dense(a), bd = to_dense(b);
      Eigen::MatrixXd kron(12, 12);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) kron.block(4 * i, 4 * j, 4, 4) = ad(i, j) * bd;
      const Eigen::VectorXd expect = kron * Eigen::Map<const Eigen::VectorXd>(x.data(), 12);
      const Vector got = kron_apply(a, b, x);
      for (int i = 0; i < 12; ++i) CHECK(got[i] == doctest::Approx(expect(i)).epsilon(1e-12));
    }
  }
}

TEST_CASE("matrix market round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "ctamg_mm_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "t4.mtx").string();

  const SparseMatrix a = tridiag(4);
  write_matrix_market(a, path);
  const SparseMatrix b = read_matrix_market(path);
  CHECK(b.n_rows == 4);
  CHECK(to_dense(a) == to_dense(b));

  SUBCASE("symmetric storage expands to the full matrix") {
    const std::string spath = (dir / "sym.mtx").string();
    std::ofstream out(spath);
    out << "%%MatrixMarket matrix coordinate real symmetric\n"
        << "% lower triangle only\n"
        << "3 3 3\n"
        << "1 1 2.0\n2 1 -1.0\n3 3 4.0\n";
    out.close();
    const SparseMatrix s = read_matrix_market(spath);
    CHECK(s.at(0, 1) == doctest::Approx(-1.0));
    CHECK(s.at(1, 0) == doctest::Approx(-1.0));
    CHECK(s.at(2, 2) == doctest::Approx(4.0));
    CHECK(s.nnz() == 4);
  }
  SUBCASE("malformed header is a parse error") {
    const std::string bpath = (dir / "bad.mtx").string();
    std::ofstream out(bpath);
    out << "%%NotMatrixMarket nonsense\n1 1 1\n1 1 1.0\n";
    out.close();
    CHECK_THROWS_AS(read_matrix_market(bpath), std::runtime_error);
  }
  SUBCASE("entry count mismatch is a parse error") {
    const std::string bpath = (dir / "short.mtx").string();
    std::ofstream out(bpath);
    out << "%%MatrixMarket matrix coordinate real general\n3 3 2\n1 1 1.0\n";
    out.close();
    CHECK_THROWS_AS(read_matrix_market(bpath), std::runtime_error);
  }
}

TEST_CASE("transpose preserves the entry multiset") {
  Rng rng(31);
  const SparseMatrix a = testing::random_sparse(10, 7, 0.25, rng);
  const SparseMatrix t = transpose(a);
  std::vector<std::tuple<int, int, double>> ea, et;
  for (int i = 0; i < a.n_rows; ++i)
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
      ea.emplace_back(i, a.col_indices[k], a.values[k]);
  for (int i = 0; i < t.n_rows; ++i)
    for (int k = t.row_offsets[i]; k < t.row_offsets[i + 1]; ++k)
      et.emplace_back(t.col_indices[k], i, t.values[k]);
  std::sort(ea.begin(), ea.end());
  std::sort(et.begin(), et.end());
  CHECK(ea == et);
}

TEST_CASE("triple product agrees with dense evaluation up to n = 12") {
  Rng rng(41);
  for (int n = 2; n <= 12; n += 2) {
    const SparseMatrix r = testing::random_sparse(n, n, 0.4, rng);
    const SparseMatrix a = testing::random_sparse(n, n, 0.4, rng);
    const SparseMatrix p = testing::random_sparse(n, n, 0.4, rng);
    const Eigen::MatrixXd expect = to_dense(r) * to_dense(a) * to_dense(p);
    CHECK((expect - to_dense(triple_product(r, a, p))).norm() <=
          1e-12 * (1.0 + expect.norm()));
  }
}

TEST_CASE("kron_apply agrees with dense Kronecker up to dimension 5") {
  Rng rng(43);
  for (int na = 1; na <= 5; na += 2)
    for (int nb = 2; nb <= 5; nb += 3) {
      const SparseMatrix a = testing::random_sparse(na, na, 0.5, rng);
      const SparseMatrix b = testing::random_sparse(nb, nb, 0.5, rng);
      Vector x(static_cast<std::size_t>(na) * nb);
      for (double& v : x) v = rng.uniform() - 0.5;
      Eigen::MatrixXd kron(na * nb, na * nb);
      const Eigen::MatrixXd ad = to_dense(a), bd = to_dense(b);
      for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j) kron.block(nb * i, nb * j, nb, nb) = ad(i, j) * bd;
      const Eigen::VectorXd expect =
          kron * Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
      const Vector got = kron_apply(a, b, x);
      for (int i = 0; i < na * nb; ++i)
        CHECK(got[i] == doctest::Approx(expect(i)).epsilon(1e-12));
    }
}
