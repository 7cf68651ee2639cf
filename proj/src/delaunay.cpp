#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace ctamg::detail {

namespace {

struct Tri {
  int v[3];   // CCW vertices
  int nb[3];  // nb[k]: neighbor across edge opposite v[k], -1 if hull
  bool alive = true;
};

double orient(const Point& a, const Point& b, const Point& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// > 0 iff d lies inside the circumcircle of the CCW triangle (a,b,c).
double incircle(const Point& a, const Point& b, const Point& c, const Point& d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
         ad * (bdx * cdy - bdy * cdx);
}

struct PairHash {
  std::size_t operator()(const std::pair<int, int>& p) const {
    return std::hash<long long>()((static_cast<long long>(p.first) << 32) ^ p.second);
  }
};

}  // namespace

std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Point>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 3) throw std::runtime_error("delaunay: need at least 3 points");

  std::vector<Point> pts = points;
  double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
  for (const Point& p : pts) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
  const double big = 32.0 * std::max({xmax - xmin, ymax - ymin, 1.0});
  pts.push_back({cx, cy + 2.0 * big});
  pts.push_back({cx - 1.8 * big, cy - big});
  pts.push_back({cx + 1.8 * big, cy - big});

  std::vector<Tri> tris;
  tris.push_back({{n, n + 1, n + 2}, {-1, -1, -1}, true});

  std::vector<int> cavity, stack;
  std::vector<char> in_cavity;
  int last = 0;

  for (int p = 0; p < n; ++p) {
    const Point& pp = pts[p];

    // locate by walking from the most recent triangle
    int t = last;
    if (!tris[t].alive) {
      t = -1;
      for (int i = static_cast<int>(tris.size()) - 1; i >= 0; --i)
        if (tris[i].alive) { t = i; break; }
    }
    bool located = false;
    for (long steps = 0; steps <= 4 * static_cast<long>(tris.size()) + 64; ++steps) {
      const Tri& tr = tris[t];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const int i = tr.v[(k + 1) % 3], j = tr.v[(k + 2) % 3];
        if (orient(pts[i], pts[j], pp) < 0.0) { next = tr.nb[k]; break; }
      }
      if (next < 0) { located = true; break; }
      t = next;
    }
    if (!located) {  // walk got stuck near a degenerate edge; scan instead
      t = -1;
      for (int i = 0; i < static_cast<int>(tris.size()); ++i) {
        if (!tris[i].alive) continue;
        const Tri& tr = tris[i];
        bool inside = true;
        for (int k = 0; k < 3 && inside; ++k)
          inside = orient(pts[tr.v[(k + 1) % 3]], pts[tr.v[(k + 2) % 3]], pp) >= 0.0;
        if (inside) { t = i; break; }
      }
      if (t < 0) throw std::runtime_error("delaunay: point location failed");
    }

    // grow the cavity of triangles whose circumcircle contains p
    cavity.clear();
    stack.clear();
    in_cavity.assign(tris.size(), 0);
    stack.push_back(t);
    in_cavity[t] = 1;
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      cavity.push_back(c);
      for (int k = 0; k < 3; ++k) {
        const int nbk = tris[c].nb[k];
        if (nbk < 0 || in_cavity[nbk]) continue;
        const Tri& nt = tris[nbk];
        if (incircle(pts[nt.v[0]], pts[nt.v[1]], pts[nt.v[2]], pp) > 0.0) {
          in_cavity[nbk] = 1;
          stack.push_back(nbk);
        }
      }
    }

    // boundary edges of the cavity, with the outside neighbor of each
    struct BEdge { int a, b, outside; };
    std::vector<BEdge> boundary;
    for (int c : cavity) {
      for (int k = 0; k < 3; ++k) {
        const int nbk = tris[c].nb[k];
        if (nbk >= 0 && in_cavity[nbk]) continue;
        boundary.push_back({tris[c].v[(k + 1) % 3], tris[c].v[(k + 2) % 3], nbk});
      }
      tris[c].alive = false;
    }

    // fan the cavity from p; link neighbors through an edge map
    std::unordered_map<std::pair<int, int>, int, PairHash> open_edge;
    open_edge.reserve(2 * boundary.size());
    for (const BEdge& e : boundary) {
      const int nt = static_cast<int>(tris.size());
      tris.push_back({{p, e.a, e.b}, {e.outside, -1, -1}, true});
      if (e.outside >= 0) {
        Tri& out = tris[e.outside];
        for (int k = 0; k < 3; ++k)
          if (out.v[(k + 1) % 3] == e.b && out.v[(k + 2) % 3] == e.a) out.nb[k] = nt;
      }
      // edge (p, e.a) pairs with some new triangle's edge (e.b', p) where e.b' == e.a
      auto match = open_edge.find({e.a, p});
      if (match != open_edge.end()) {
        tris[nt].nb[2] = match->second;          // across edge (p, e.a)
        tris[match->second].nb[1] = nt;          // across edge (b, p) of the other
        open_edge.erase(match);
      } else {
        open_edge.emplace(std::make_pair(p, e.a), nt);
      }
      match = open_edge.find({p, e.b});
      if (match != open_edge.end()) {
        tris[nt].nb[1] = match->second;
        tris[match->second].nb[2] = nt;
        open_edge.erase(match);
      } else {
        open_edge.emplace(std::make_pair(e.b, p), nt);
      }
      last = nt;
    }
    if (!open_edge.empty()) throw std::runtime_error("delaunay: cavity not closed");
  }

  std::vector<std::array<int, 3>> out;
  out.reserve(tris.size());
  for (const Tri& t : tris) {
    if (!t.alive) continue;
    if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
    out.push_back({t.v[0], t.v[1], t.v[2]});
  }
  return out;
}

}  // namespace ctamg::detail
