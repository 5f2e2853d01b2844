#include "pcp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include "pcp/errors.hpp"

namespace pcp {
namespace {

double signed_area(const std::vector<Vec2> &poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    a += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * a;
}

Vec2 polygon_centroid(const std::vector<Vec2> &poly, double area) {
  // Shift by the first vertex to keep the cross products well scaled.
  const Vec2 o = poly[0];
  Vec2 c;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 p = poly[i] - o;
    const Vec2 q = poly[(i + 1) % poly.size()] - o;
    const double w = cross(p, q);
    c += w * (p + q);
  }
  return o + (1.0 / (6.0 * area)) * c;
}

bool segments_cross(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  auto orient = [](Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); };
  const double d1 = orient(q1, q2, p1);
  const double d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1);
  const double d4 = orient(p1, p2, q2);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

bool is_simple(const std::vector<Vec2> &poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

CellShape classify(const std::vector<Vec2> &poly) {
  if (poly.size() == 3) return CellShape::Triangle;
  if (poly.size() == 4) {
    const Vec2 e0 = poly[1] - poly[0];
    const Vec2 e1 = poly[2] - poly[1];
    const Vec2 e2 = poly[3] - poly[2];
    const Vec2 e3 = poly[0] - poly[3];
    const double s = norm(e0) * norm(e1);
    const double tol = 1e-12 * s;
    if (std::abs(dot(e0, e1)) <= tol && std::abs(dot(e1, e2)) <= tol &&
        std::abs(dot(e2, e3)) <= tol && norm(e0 + e2) <= 1e-12 * norm(e0) &&
        norm(e1 + e3) <= 1e-12 * norm(e1)) {
      return CellShape::Rectangle;
    }
  }
  return CellShape::Polygon;
}

void finalize_radius(PolytopeMesh &m) {
  m.max_radius = 0.0;
  for (double r : m.radius) m.max_radius = std::max(m.max_radius, r);
}

}  // namespace

double circumradius(const std::vector<Vec2> &poly) {
  if (poly.size() == 3) {
    const double a = norm(poly[1] - poly[0]);
    const double b = norm(poly[2] - poly[1]);
    const double c = norm(poly[0] - poly[2]);
    const double area = std::abs(signed_area(poly));
    if (!(area > 0.0)) throw DegenerateCell("triangle with zero area");
    return a * b * c / (4.0 * area);
  }
  const double area = signed_area(poly);
  if (area == 0.0) throw DegenerateCell("polygon with zero area");
  const Vec2 c = polygon_centroid(poly, area);
  double r = 0.0;
  for (const Vec2 &p : poly) r = std::max(r, norm(p - c));
  return r;
}

double PolytopeMesh::perimeter(std::size_t k) const {
  double s = 0.0;
  for (const CellSide &e : sides[k]) s += e.length;
  return s;
}

Vec2 PolytopeMesh::normal_closure(std::size_t k) const {
  Vec2 s;
  for (const CellSide &e : sides[k]) s += e.length * e.normal;
  return s;
}

double PolytopeMesh::max_side(std::size_t k) const {
  double s = 0.0;
  for (const CellSide &e : sides[k]) s = std::max(s, e.length);
  return s;
}

PolytopeMesh build_polygon_mesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells,
                                BoundaryKind boundary, Vec2 period) {
  PolytopeMesh m;
  m.dim = 2;
  m.boundary = boundary;
  m.period = period;
  m.vertices = std::move(vertices);
  m.cells = std::move(cells);
  const std::size_t nc = m.cells.size();
  if (nc == 0) throw ConfigError("mesh has no cells");
  m.sides.resize(nc);
  m.shape.resize(nc);
  m.measure.resize(nc);
  m.centroid.resize(nc);
  m.radius.resize(nc);

  std::map<std::pair<int, int>, std::pair<int, int>> open;  // edge -> (cell, side)
  for (std::size_t k = 0; k < nc; ++k) {
    const auto &loop = m.cells[k];
    if (loop.size() < 3) throw DegenerateCell("polygon with fewer than 3 vertices");
    std::vector<Vec2> poly;
    for (int v : loop) {
      if (v < 0 || static_cast<std::size_t>(v) >= m.vertices.size()) {
        throw ConfigError("cell references a missing vertex");
      }
      poly.push_back(m.vertices[v]);
    }
    const double area = signed_area(poly);
    if (!(area > 0.0)) {
      std::ostringstream os;
      os << "cell " << k << " is degenerate or not counterclockwise";
      throw DegenerateCell(os.str());
    }
    if (!is_simple(poly)) {
      std::ostringstream os;
      os << "cell " << k << " is self-intersecting";
      throw DegenerateCell(os.str());
    }
    m.measure[k] = area;
    m.centroid[k] = polygon_centroid(poly, area);
    m.radius[k] = circumradius(poly);
    m.shape[k] = classify(poly);
    for (std::size_t i = 0; i < loop.size(); ++i) {
      CellSide s;
      s.a = poly[i];
      s.b = poly[(i + 1) % poly.size()];
      const Vec2 t = s.b - s.a;
      s.length = norm(t);
      if (!(s.length > 0.0)) throw DegenerateCell("zero-length edge");
      s.normal = Vec2{t.y / s.length, -t.x / s.length};
      m.sides[k].push_back(s);
      const int va = loop[i];
      const int vb = loop[(i + 1) % loop.size()];
      auto it = open.find({vb, va});
      if (it != open.end()) {
        const auto [j, js] = it->second;
        CellSide &mine = m.sides[k].back();
        CellSide &theirs = m.sides[j][js];
        mine.neighbor = j;
        mine.neighbor_side = js;
        theirs.neighbor = static_cast<int>(k);
        theirs.neighbor_side = static_cast<int>(i);
        open.erase(it);
      } else {
        if (open.count({va, vb})) throw ConfigError("edge shared with identical orientation");
        open[{va, vb}] = {static_cast<int>(k), static_cast<int>(i)};
      }
    }
  }

  if (boundary == BoundaryKind::Periodic && !open.empty()) {
    std::vector<std::pair<int, int>> rest;
    for (const auto &[edge, cs] : open) rest.push_back(cs);
    std::vector<bool> used(rest.size(), false);
    const double scale = std::max({std::abs(period.x), std::abs(period.y), 1e-300});
    const double tol = 1e-9 * scale;
    for (std::size_t p = 0; p < rest.size(); ++p) {
      if (used[p]) continue;
      const CellSide &sp = m.sides[rest[p].first][rest[p].second];
      bool found = false;
      for (std::size_t q = p + 1; q < rest.size() && !found; ++q) {
        if (used[q]) continue;
        const CellSide &sq = m.sides[rest[q].first][rest[q].second];
        for (const Vec2 shift : {Vec2{period.x, 0}, Vec2{-period.x, 0}, Vec2{0, period.y},
                                 Vec2{0, -period.y}}) {
          if (norm(shift) == 0.0) continue;
          if (norm(sp.a + shift - sq.b) <= tol && norm(sp.b + shift - sq.a) <= tol) {
            CellSide &a = m.sides[rest[p].first][rest[p].second];
            CellSide &b = m.sides[rest[q].first][rest[q].second];
            a.neighbor = rest[q].first;
            a.neighbor_side = rest[q].second;
            a.shift = shift;
            b.neighbor = rest[p].first;
            b.neighbor_side = rest[p].second;
            b.shift = -shift;
            used[p] = used[q] = true;
            found = true;
            break;
          }
        }
      }
      if (!found) throw ConfigError("periodic boundary edge has no translated partner");
    }
  }

  for (std::size_t k = 0; k < nc; ++k) {
    for (std::size_t i = 0; i < m.sides[k].size(); ++i) {
      CellSide &s = m.sides[k][i];
      if (s.face >= 0) continue;
      Face f;
      f.left = static_cast<int>(k);
      f.left_side = static_cast<int>(i);
      f.right = s.neighbor;
      f.right_side = s.neighbor_side;
      f.normal = s.normal;
      f.length = s.length;
      s.face = static_cast<int>(m.faces.size());
      if (s.neighbor >= 0) m.sides[s.neighbor][s.neighbor_side].face = s.face;
      m.faces.push_back(f);
    }
  }
  finalize_radius(m);
  return m;
}

PolytopeMesh build_cartesian(int nx, int ny, const Bounds &b, BoundaryKind boundary) {
  if (nx < 1 || ny < 1 || !(b.x1 > b.x0) || !(b.y1 > b.y0)) {
    throw ConfigError("Cartesian mesh needs nx, ny >= 1 and nondegenerate bounds");
  }
  std::vector<Vec2> v;
  v.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      v.push_back({b.x0 + (b.x1 - b.x0) * i / nx, b.y0 + (b.y1 - b.y0) * j / ny});
    }
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::vector<int>> cells;
  cells.reserve(static_cast<std::size_t>(nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return build_polygon_mesh(std::move(v), std::move(cells), boundary,
                            {b.x1 - b.x0, b.y1 - b.y0});
}

PolytopeMesh build_triangular(int nx, int ny, const Bounds &b, BoundaryKind boundary) {
  if (nx < 1 || ny < 1 || !(b.x1 > b.x0) || !(b.y1 > b.y0)) {
    throw ConfigError("triangular mesh needs nx, ny >= 1 and nondegenerate bounds");
  }
  std::vector<Vec2> v;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      v.push_back({b.x0 + (b.x1 - b.x0) * i / nx, b.y0 + (b.y1 - b.y0) * j / ny});
    }
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::vector<int>> cells;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return build_polygon_mesh(std::move(v), std::move(cells), boundary,
                            {b.x1 - b.x0, b.y1 - b.y0});
}

PolytopeMesh build_interval(int nx, double x0, double x1, BoundaryKind boundary) {
  if (nx < 1 || !(x1 > x0)) throw ConfigError("interval mesh needs nx >= 1 and x1 > x0");
  PolytopeMesh m;
  m.dim = 1;
  m.boundary = boundary;
  m.period = {x1 - x0, 0.0};
  const double dx = (x1 - x0) / nx;
  for (int i = 0; i <= nx; ++i) m.vertices.push_back({x0 + dx * i, 0.0});
  m.sides.resize(static_cast<std::size_t>(nx));
  for (int k = 0; k < nx; ++k) {
    m.cells.push_back({k, k + 1});
    m.shape.push_back(CellShape::Interval);
    m.measure.push_back(dx);
    const double xl = m.vertices[static_cast<std::size_t>(k)].x;
    const double xr = m.vertices[static_cast<std::size_t>(k + 1)].x;
    m.centroid.push_back({0.5 * (xl + xr), 0.0});
    m.radius.push_back(0.5 * dx);
    CellSide left;
    left.a = left.b = {xl, 0.0};
    left.normal = {-1.0, 0.0};
    left.length = 1.0;
    CellSide right;
    right.a = right.b = {xr, 0.0};
    right.normal = {1.0, 0.0};
    right.length = 1.0;
    m.sides[static_cast<std::size_t>(k)] = {left, right};
  }
  for (int k = 0; k < nx; ++k) {
    auto &s = m.sides[static_cast<std::size_t>(k)];
    // Side 0 faces left, side 1 faces right.
    if (k + 1 < nx) {
      s[1].neighbor = k + 1;
      s[1].neighbor_side = 0;
    } else if (boundary == BoundaryKind::Periodic) {
      s[1].neighbor = 0;
      s[1].neighbor_side = 0;
      s[1].shift = {-(x1 - x0), 0.0};
    }
    if (k > 0) {
      s[0].neighbor = k - 1;
      s[0].neighbor_side = 1;
    } else if (boundary == BoundaryKind::Periodic) {
      s[0].neighbor = nx - 1;
      s[0].neighbor_side = 1;
      s[0].shift = {x1 - x0, 0.0};
    }
  }
  for (int k = 0; k < nx; ++k) {
    for (int i = 0; i < 2; ++i) {
      CellSide &s = m.sides[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
      if (s.face >= 0) continue;
      Face f;
      f.left = k;
      f.left_side = i;
      f.right = s.neighbor;
      f.right_side = s.neighbor_side;
      f.normal = s.normal;
      f.length = 1.0;
      s.face = static_cast<int>(m.faces.size());
      if (s.neighbor >= 0) m.sides[static_cast<std::size_t>(s.neighbor)][static_cast<std::size_t>(s.neighbor_side)].face = s.face;
      m.faces.push_back(f);
    }
  }
  finalize_radius(m);
  return m;
}

PolytopeMesh read_mesh(std::istream &in, BoundaryKind boundary, Vec2 period) {
  long nv = 0;
  long nc = 0;
  if (!(in >> nv >> nc) || nv < 3 || nc < 1) throw ConfigError("mesh header must be `nv nc`");
  std::vector<Vec2> v(static_cast<std::size_t>(nv));
  for (auto &p : v) {
    if (!(in >> p.x >> p.y)) throw ConfigError("mesh file truncated in vertex list");
  }
  std::vector<std::vector<int>> cells(static_cast<std::size_t>(nc));
  for (auto &c : cells) {
    int deg = 0;
    if (!(in >> deg) || deg < 3) throw ConfigError("mesh cell needs at least 3 vertices");
    c.resize(static_cast<std::size_t>(deg));
    for (int &i : c) {
      if (!(in >> i)) throw ConfigError("mesh file truncated in cell list");
    }
  }
  if (boundary == BoundaryKind::Periodic && period.x == 0.0 && period.y == 0.0) {
    double x0 = v[0].x, x1 = v[0].x, y0 = v[0].y, y1 = v[0].y;
    for (const Vec2 &p : v) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
    period = {x1 - x0, y1 - y0};
  }
  return build_polygon_mesh(std::move(v), std::move(cells), boundary, period);
}

PolytopeMesh read_mesh(const std::filesystem::path &path, BoundaryKind boundary, Vec2 period) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mesh file " + path.string());
  return read_mesh(in, boundary, period);
}

void write_mesh(std::ostream &out, const PolytopeMesh &mesh) {
  out << mesh.vertices.size() << ' ' << mesh.cells.size() << '\n' << std::setprecision(17);
  for (const Vec2 &p : mesh.vertices) out << p.x << ' ' << p.y << '\n';
  for (const auto &c : mesh.cells) {
    out << c.size();
    for (int i : c) out << ' ' << i;
    out << '\n';
  }
}

}  // namespace pcp
