#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>

#include "ctamg/assembly.hpp"
#include "ctamg/tensor_solver.hpp"
#include "test_helpers.hpp"

using namespace ctamg;
using testing::to_dense;

TEST_CASE("unit square level 1 assembles the classic stencil") {
  const Mesh m = generate_square_mesh(1);
  const AssembledProblem p = assemble(m, 1);
  REQUIRE(p.n_interior() == 1);
  CHECK(p.stiffness.at(0, 0) == doctest::Approx(4.0));
  CHECK(p.positive_offdiag_count == 0);

  // mass row at the single interior node integrates the hat function over
  // the interior couplings
  const Vector load = load_vector(p, {1.0});
  CHECK(load[0] == doctest::Approx(0.25));
  CHECK(load_vector(p, {0.0}) == Vector{0.0});
}

TEST_CASE("full stiffness annihilates constants") {
  SparseMatrix k_full, m_full;
  const Mesh m = generate_disk_mesh(3);
  assemble_full(m, k_full, m_full);
  const Vector ones(m.nodes.size(), 1.0);
  const Vector y = spmv(k_full, ones);
  for (double v : y) CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("mass matrix total is bounded by the domain area") {
  const Mesh m = generate_square_mesh(3);
  const AssembledProblem p = assemble(m, 3);
  double total = 0.0;
  for (double v : p.mass.values) total += v;
  CHECK(total <= 1.0 + 1e-12);
  CHECK(total > 0.0);
}

TEST_CASE("load vector matches a vertex quadrature oracle") {
  const Mesh mesh = generate_square_mesh(4);
  const AssembledProblem p = assemble(mesh, 4);
  auto g = [](const Point& pt) { return std::sin(2.0 * pt.x) * (1.0 + pt.y * pt.y); };

  Vector samples(p.n_interior());
  for (int i = 0; i < p.n_interior(); ++i) samples[i] = g(p.interior_coord(i));
  const Vector mg = load_vector(p, samples);

  // per row: sum over incident triangles of |T|/3 * g at the vertex
  Vector oracle(p.n_interior(), 0.0);
  std::vector<int> node_to_interior(mesh.nodes.size(), -1);
  for (int i = 0; i < p.n_interior(); ++i) node_to_interior[p.interior_to_node[i]] = i;
  for (const auto& t : mesh.triangles) {
    const double area = triangle_area(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]);
    for (int k = 0; k < 3; ++k)
      if (node_to_interior[t[k]] >= 0)
        oracle[node_to_interior[t[k]]] += area / 3.0 * g(mesh.nodes[t[k]]);
  }
  const double h = std::pow(2.0, -4);
  for (int i = 0; i < p.n_interior(); ++i) CHECK(std::abs(mg[i] - oracle[i]) <= 4.0 * h * h * h);
}

TEST_CASE("assembled stiffness is symmetric positive definite") {
  const Mesh m = generate_square_mesh(2);
  const AssembledProblem p = assemble(m, 2);
  const Eigen::MatrixXd k = to_dense(p.stiffness);
  CHECK((k - k.transpose()).norm() <= 1e-12 * k.norm());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("degenerate triangles are rejected") {
  Mesh m;
  m.nodes = {{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}};
  m.triangles = {{0, 1, 2}};
  m.boundary_nodes = {0, 1, 2};
  SparseMatrix k, mm;
  CHECK_THROWS_AS(assemble_full(m, k, mm), std::runtime_error);
}

namespace {

// -lap(u) = 1 on the unit square, solved per level with plain CG
Vector solve_poisson_square(const AssembledProblem& p) {
  const Vector rhs = load_vector(p, Vector(p.n_interior(), 1.0));
  auto [x, iters] = pcg(p.stiffness, rhs, 1e-11, 20000);
  (void)iters;
  return x;
}

}  // namespace

TEST_CASE("finite element solutions converge at second order") {
  const Mesh fine_mesh = generate_square_mesh(6);
  const AssembledProblem fine = assemble(fine_mesh, 6);
  const Vector u_fine = solve_poisson_square(fine);

  // index fine values by grid coordinates for the shared-node comparison
  std::map<std::pair<long, long>, double> fine_at;
  const double scale = 1 << 6;
  for (int i = 0; i < fine.n_interior(); ++i) {
    const Point pt = fine.interior_coord(i);
    fine_at[{std::lround(pt.x * scale), std::lround(pt.y * scale)}] = u_fine[i];
  }

  double prev_err = 0.0;
  for (int level = 3; level <= 5; ++level) {
    const Mesh mesh = generate_square_mesh(level);
    const AssembledProblem p = assemble(mesh, level);
    const Vector u = solve_poisson_square(p);
    double err2 = 0.0;
    for (int i = 0; i < p.n_interior(); ++i) {
      const Point pt = p.interior_coord(i);
      const double ref = fine_at.at({std::lround(pt.x * scale), std::lround(pt.y * scale)});
      err2 += (u[i] - ref) * (u[i] - ref);
    }
    const double err = std::sqrt(err2 / p.n_interior());
    if (level > 3) CHECK(prev_err / err >= 3.0);
    prev_err = err;
  }
}
