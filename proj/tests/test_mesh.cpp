#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ctamg/mesh.hpp"

using namespace ctamg;

TEST_CASE("square mesh counts") {
  const Mesh m1 = generate_square_mesh(1);
  CHECK(m1.nodes.size() == 9);
  CHECK(m1.triangles.size() == 8);
  CHECK(m1.boundary_nodes.size() == 8);
  validate_mesh(m1);

  const Mesh m2 = generate_square_mesh(2);
  CHECK(m2.nodes.size() == 25);
  CHECK(m2.triangles.size() == 32);
  validate_mesh(m2);

  for (const auto& t : m2.triangles) {
    const double area = triangle_area(m2.nodes[t[0]], m2.nodes[t[1]], m2.nodes[t[2]]);
    CHECK(area == doctest::Approx(std::pow(2.0, -2 * 2 - 1)));
  }
}

TEST_CASE("disk mesh geometry") {
  for (int level = 2; level <= 5; ++level) {
    CAPTURE(level);
    const Mesh m = generate_disk_mesh(level);
    validate_mesh(m);

    for (const Point& p : m.nodes) CHECK(std::hypot(p.x, p.y) <= 0.5 + 1e-12);
    for (int b : m.boundary_nodes)
      CHECK(std::hypot(m.nodes[b].x, m.nodes[b].y) == doctest::Approx(0.5).epsilon(1e-12));

    const double hmax = std::pow(2.0, -level);
    double longest = 0.0, total_area = 0.0;
    for (const auto& t : m.triangles) {
      for (int k = 0; k < 3; ++k) {
        const Point& a = m.nodes[t[k]];
        const Point& b = m.nodes[t[(k + 1) % 3]];
        longest = std::max(longest, std::hypot(a.x - b.x, a.y - b.y));
      }
      total_area += triangle_area(m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]]);
    }
    CHECK(longest <= hmax);
    // area of the inscribed polygon approaches pi/4 from below
    const double disk_area = 3.14159265358979323846 * 0.25;
    CHECK(total_area <= disk_area);
    CHECK(disk_area - total_area <= 3.0 * hmax);
  }
}

TEST_CASE("disk mesh is deterministic") {
  const Mesh a = generate_disk_mesh(3);
  const Mesh b = generate_disk_mesh(3);
  REQUIRE(a.nodes.size() == b.nodes.size());
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    CHECK(a.nodes[i].x == b.nodes[i].x);
    CHECK(a.nodes[i].y == b.nodes[i].y);
  }
  CHECK(a.triangles == b.triangles);
  CHECK(a.boundary_nodes == b.boundary_nodes);
}

TEST_CASE("mesh file round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "ctamg_mesh_test";
  std::filesystem::create_directories(dir);

  SUBCASE("smallest valid file") {
    const std::string path = (dir / "unit.txt").string();
    std::ofstream out(path);
    out << "4 2 4\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 3\n0 1 2 3\n";
    out.close();
    const Mesh m = load_mesh(path);
    CHECK(m.nodes.size() == 4);
    CHECK(m.boundary_nodes.size() == 4);
  }
  SUBCASE("write then load is the identity") {
    const Mesh m = generate_disk_mesh(3);
    const std::string path = (dir / "disk3.txt").string();
    write_mesh(m, path);
    const Mesh r = load_mesh(path);
    CHECK(r.triangles == m.triangles);
    CHECK(r.boundary_nodes == m.boundary_nodes);
    REQUIRE(r.nodes.size() == m.nodes.size());
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
      CHECK(r.nodes[i].x == m.nodes[i].x);
      CHECK(r.nodes[i].y == m.nodes[i].y);
    }
  }
  SUBCASE("repeated triangle is rejected") {
    const std::string path = (dir / "dup.txt").string();
    std::ofstream out(path);
    out << "4 3 4\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 1 2\n0 2 3\n0 1 2 3\n";
    out.close();
    CHECK_THROWS_AS(load_mesh(path), std::runtime_error);
  }
  SUBCASE("degenerate triangle is rejected") {
    const std::string path = (dir / "degen.txt").string();
    std::ofstream out(path);
    out << "4 2 4\n0 0\n1 0\n2 0\n0 1\n0 1 2\n0 2 3\n0 1 2 3\n";
    out.close();
    CHECK_THROWS_AS(load_mesh(path), std::runtime_error);
  }
  SUBCASE("truncated file is rejected") {
    const std::string path = (dir / "trunc.txt").string();
    std::ofstream out(path);
    out << "4 2 4\n0 0\n1 0\n";
    out.close();
    CHECK_THROWS_AS(load_mesh(path), std::runtime_error);
  }
}
