#include "ctamg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "delaunay.hpp"

namespace ctamg {

namespace {

constexpr double kPi = 3.14159265358979323846;

// splitmix64; used instead of <random> distributions so meshes are
// bit-identical across platforms
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_double(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

}  // namespace

double triangle_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

bool Mesh::is_boundary(int node) const {
  return std::binary_search(boundary_nodes.begin(), boundary_nodes.end(), node);
}

void validate_mesh(const Mesh& m) {
  const int nv = static_cast<int>(m.nodes.size());
  double bbox_area;
  {
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    if (nv > 0) {
      xmin = xmax = m.nodes[0].x;
      ymin = ymax = m.nodes[0].y;
    }
    for (const Point& p : m.nodes) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    bbox_area = std::max((xmax - xmin) * (ymax - ymin), 1e-300);
  }

  std::set<std::array<int, 3>> seen;
  // directed edge -> count; a manifold interior edge appears once per direction
  std::map<std::pair<int, int>, int> edges;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tri = m.triangles[t];
    for (int k = 0; k < 3; ++k)
      if (tri[k] < 0 || tri[k] >= nv)
        throw std::runtime_error("mesh: triangle " + std::to_string(t) + " node out of range");
    const double area = triangle_area(m.nodes[tri[0]], m.nodes[tri[1]], m.nodes[tri[2]]);
    if (area <= 1e-14 * bbox_area)
      throw std::runtime_error("mesh: degenerate or negatively oriented triangle " +
                               std::to_string(t));
    std::array<int, 3> key = tri;
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second)
      throw std::runtime_error("mesh: repeated triangle " + std::to_string(t));
    for (int k = 0; k < 3; ++k) {
      const auto e = std::make_pair(tri[k], tri[(k + 1) % 3]);
      if (++edges[e] > 1)
        throw std::runtime_error("mesh: non-manifold edge " + std::to_string(e.first) + "-" +
                                 std::to_string(e.second));
    }
  }

  std::set<int> boundary_from_edges;
  for (const auto& [e, cnt] : edges) {
    (void)cnt;
    if (!edges.count({e.second, e.first})) {
      boundary_from_edges.insert(e.first);
      boundary_from_edges.insert(e.second);
    }
  }
  for (int b : m.boundary_nodes)
    if (b < 0 || b >= nv) throw std::runtime_error("mesh: boundary node out of range");
  std::vector<int> declared(m.boundary_nodes);
  std::sort(declared.begin(), declared.end());
  if (!std::equal(declared.begin(), declared.end(), boundary_from_edges.begin(),
                  boundary_from_edges.end()))
    throw std::runtime_error("mesh: boundary_nodes do not match boundary edges");
}

Mesh generate_square_mesh(int level) {
  if (level < 1) throw std::invalid_argument("generate_square_mesh: level must be >= 1");
  const int n = 1 << level;  // cells per side
  const double h = 1.0 / n;
  Mesh m;
  m.nodes.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) m.nodes.push_back({i * h, j * h});
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      if (i == 0 || j == 0 || i == n || j == n) m.boundary_nodes.push_back(id(i, j));
  std::sort(m.boundary_nodes.begin(), m.boundary_nodes.end());
  return m;
}

Mesh generate_disk_mesh(int level) {
  if (level < 2) throw std::invalid_argument("generate_disk_mesh: level must be >= 2");
  const double radius = 0.5;
  const double target = 0.55 * std::pow(2.0, -level);  // leaves room for jitter
  const int rings = std::max(2, static_cast<int>(std::ceil(radius / target)));
  const double dr = radius / rings;
  const std::uint64_t seed = 0x5d1dabcdULL + 977u * static_cast<std::uint64_t>(level);

  std::vector<Point> pts;
  pts.push_back({0.0, 0.0});
  int outer_start = 0;
  for (int ring = 1; ring <= rings; ++ring) {
    double r = dr * ring;
    if (ring < rings) {
      // graded radii: deterministic jitter keeps the rings incommensurate
      r += (unit_double(mix64(seed ^ (2u * ring))) - 0.5) * 0.30 * dr;
    } else {
      outer_start = static_cast<int>(pts.size());
    }
    const int count = std::max(6, static_cast<int>(std::lround(2.0 * kPi * dr * ring / target)));
    const double offset = unit_double(mix64(seed ^ (2u * ring + 1u))) * 2.0 * kPi / count;
    for (int k = 0; k < count; ++k) {
      const double a = offset + 2.0 * kPi * k / count;
      pts.push_back({r * std::cos(a), r * std::sin(a)});
    }
  }

  Mesh m;
  m.nodes = pts;
  m.triangles = detail::delaunay_triangulate(pts);
  for (int i = outer_start; i < static_cast<int>(pts.size()); ++i) m.boundary_nodes.push_back(i);
  validate_mesh(m);
  return m;
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  int nv, nt, nb;
  if (!(in >> nv >> nt >> nb) || nv < 0 || nt < 0 || nb < 0)
    throw std::runtime_error(path + ": bad mesh header");
  Mesh m;
  m.nodes.resize(nv);
  for (int i = 0; i < nv; ++i)
    if (!(in >> m.nodes[i].x >> m.nodes[i].y))
      throw std::runtime_error(path + ": bad node " + std::to_string(i));
  m.triangles.resize(nt);
  for (int t = 0; t < nt; ++t)
    if (!(in >> m.triangles[t][0] >> m.triangles[t][1] >> m.triangles[t][2]))
      throw std::runtime_error(path + ": bad triangle " + std::to_string(t));
  m.boundary_nodes.resize(nb);
  for (int b = 0; b < nb; ++b)
    if (!(in >> m.boundary_nodes[b]))
      throw std::runtime_error(path + ": bad boundary index " + std::to_string(b));
  std::sort(m.boundary_nodes.begin(), m.boundary_nodes.end());
  m.boundary_nodes.erase(std::unique(m.boundary_nodes.begin(), m.boundary_nodes.end()),
                         m.boundary_nodes.end());
  validate_mesh(m);
  return m;
}

void write_mesh(const Mesh& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << m.nodes.size() << " " << m.triangles.size() << " " << m.boundary_nodes.size() << "\n";
  char buf[80];
  for (const Point& p : m.nodes) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", p.x, p.y);
    out << buf;
  }
  for (const auto& t : m.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
  for (std::size_t i = 0; i < m.boundary_nodes.size(); ++i)
    out << m.boundary_nodes[i] << (i + 1 == m.boundary_nodes.size() ? "\n" : " ");
  if (!m.boundary_nodes.empty()) out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace ctamg
