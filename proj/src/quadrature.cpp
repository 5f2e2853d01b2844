#include "pcp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pcp/errors.hpp"

namespace pcp {
namespace {

// (P_n(x), P_n'(x)) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

void sort_rule(Rule1D &r) {
  std::vector<std::size_t> idx(r.nodes.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return r.nodes[a] < r.nodes[b]; });
  Rule1D s;
  for (auto i : idx) {
    s.nodes.push_back(r.nodes[i]);
    s.weights.push_back(r.weights[i]);
  }
  r = std::move(s);
}

}  // namespace

Rule1D gauss_rule(int Q) {
  if (Q < 1 || Q > 10) {
    std::ostringstream os;
    os << "Gauss rule with Q=" << Q << " (supported 1..10)";
    throw UnsupportedOrder(os.str());
  }
  Rule1D r;
  for (int i = 1; i <= Q; ++i) {
    double x = std::cos(std::numbers::pi * (i - 0.25) / (Q + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(Q, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [p, dp] = legendre(Q, x);
    (void)p;
    r.nodes.push_back(0.5 * x);
    r.weights.push_back(1.0 / ((1.0 - x * x) * dp * dp));
  }
  sort_rule(r);
  return r;
}

Rule1D lobatto_rule(int L) {
  if (L < 2 || L > 10) {
    std::ostringstream os;
    os << "Gauss-Lobatto rule with L=" << L << " (supported 2..10)";
    throw UnsupportedOrder(os.str());
  }
  const int n = L - 1;
  Rule1D r;
  const double wend = 1.0 / (L * (L - 1.0));
  r.nodes.push_back(-0.5);
  r.weights.push_back(wend);
  for (int i = 1; i < n; ++i) {
    // Roots of P_n' via Newton on (1 - x^2) P_n'' = 2x P_n' - n(n+1) P_n.
    double x = -std::cos(std::numbers::pi * i / n);
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double d2p = (2.0 * x * dp - n * (n + 1.0) * p) / (1.0 - x * x);
      const double dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double p = legendre(n, x).first;
    r.nodes.push_back(0.5 * x);
    r.weights.push_back(1.0 / (L * (L - 1.0) * p * p));
  }
  r.nodes.push_back(0.5);
  r.weights.push_back(wend);
  sort_rule(r);
  return r;
}

QuadratureSet gauss_rules(int Q, int L) {
  QuadratureSet q;
  q.Q = Q;
  q.L = L;
  q.gauss = gauss_rule(Q);
  q.lobatto = lobatto_rule(L);
  return q;
}

int lobatto_size_for_degree(int K) {
  // L = 2 would put all weight on the boundary (beta = 1/2), which the
  // decomposition cannot use.
  return std::max(3, (K + 4) / 2);
}

std::vector<Vec2> side_nodes(const CellSide &side, const Rule1D &gauss) {
  if (side.a == side.b) return {side.a};
  std::vector<Vec2> out;
  out.reserve(gauss.nodes.size());
  const Vec2 mid = 0.5 * (side.a + side.b);
  const Vec2 t = side.b - side.a;
  for (double z : gauss.nodes) out.push_back(mid + z * t);
  return out;
}

double CellDecomposition::total_weight() const {
  double s = 0.0;
  for (double c : side_weight) s += c;
  for (const auto &n : interior) s += n.w;
  return s;
}

CellDecomposition triangle_decomposition(const std::array<Vec2, 3> &tri, const QuadratureSet &q) {
  const double area = 0.5 * cross(tri[1] - tri[0], tri[2] - tri[0]);
  if (!(area > 0.0)) throw DegenerateCell("triangle with nonpositive area");
  CellDecomposition d;
  const double wh1 = q.omega_hat1();
  d.side_weight.assign(3, 2.0 * wh1 / 3.0);
  for (int f = 0; f < 3; ++f) {
    const Vec2 &P = tri[static_cast<std::size_t>(f)];
    const Vec2 &Pn = tri[static_cast<std::size_t>((f + 1) % 3)];
    const Vec2 &Pp = tri[static_cast<std::size_t>((f + 2) % 3)];
    for (std::size_t mu = 0; mu < q.gauss.nodes.size(); ++mu) {
      const double s = 0.5 + q.gauss.nodes[mu];
      for (std::size_t nu = 1; nu + 1 < q.lobatto.nodes.size(); ++nu) {
        const double t = 0.5 + q.lobatto.nodes[nu];
        const double l1 = s;
        const double l2 = t * (1.0 - s);
        const double l3 = (1.0 - t) * (1.0 - s);
        WeightedNode n;
        n.x = l1 * P + l2 * Pn + l3 * Pp;
        n.w = 2.0 * q.gauss.weights[mu] * q.lobatto.weights[nu] * (1.0 - s) / 3.0;
        d.interior.push_back(n);
      }
    }
  }
  const double perim = norm(tri[1] - tri[0]) + norm(tri[2] - tri[1]) + norm(tri[0] - tri[2]);
  const double longest =
      std::max({norm(tri[1] - tri[0]), norm(tri[2] - tri[1]), norm(tri[0] - tri[2])});
  d.beta = (2.0 * wh1 / 3.0) * perim / (2.0 * longest);
  return d;
}

CellDecomposition rectangle_decomposition(Vec2 o, Vec2 ex, Vec2 ey, const QuadratureSet &q) {
  const double dx = norm(ex);
  const double dy = norm(ey);
  if (!(dx > 0.0) || !(dy > 0.0) || !(cross(ex, ey) > 0.0)) {
    throw DegenerateCell("rectangle with nonpositive area");
  }
  CellDecomposition d;
  const double wh1 = q.omega_hat1();
  const double fx = dy / (dx + dy);  // weight of the GL_x (x) G_y family
  const double fy = dx / (dx + dy);
  // Sides in CCW order from o: bottom (along ex), right, top, left.
  d.side_weight = {wh1 * fy, wh1 * fx, wh1 * fy, wh1 * fx};
  const Vec2 c = o + 0.5 * ex + 0.5 * ey;
  for (std::size_t nu = 1; nu + 1 < q.lobatto.nodes.size(); ++nu) {
    for (std::size_t mu = 0; mu < q.gauss.nodes.size(); ++mu) {
      const double w = q.lobatto.weights[nu] * q.gauss.weights[mu];
      d.interior.push_back({c + q.lobatto.nodes[nu] * ex + q.gauss.nodes[mu] * ey, w * fx});
      d.interior.push_back({c + q.gauss.nodes[mu] * ex + q.lobatto.nodes[nu] * ey, w * fy});
    }
  }
  d.beta = wh1;
  return d;
}

CellDecomposition interval_decomposition(double x0, double x1, const QuadratureSet &q) {
  if (!(x1 > x0)) throw DegenerateCell("interval with nonpositive length");
  CellDecomposition d;
  const double wh1 = q.omega_hat1();
  d.side_weight = {wh1, wh1};
  for (std::size_t nu = 1; nu + 1 < q.lobatto.nodes.size(); ++nu) {
    d.interior.push_back(
        {{0.5 * (x0 + x1) + q.lobatto.nodes[nu] * (x1 - x0), 0.0}, q.lobatto.weights[nu]});
  }
  d.beta = wh1;
  return d;
}

CellDecomposition decompose_cell(const PolytopeMesh &mesh, std::size_t k, const QuadratureSet &q) {
  const auto &loop = mesh.cells[k];
  switch (mesh.shape[k]) {
    case CellShape::Interval:
      return interval_decomposition(mesh.vertices[static_cast<std::size_t>(loop[0])].x,
                                    mesh.vertices[static_cast<std::size_t>(loop[1])].x, q);
    case CellShape::Triangle: {
      // Side i of the mesh runs from vertex i to vertex i+1; order the side
      // weights to match (they are all equal for triangles).
      const std::array<Vec2, 3> tri{mesh.sides[k][0].a, mesh.sides[k][1].a, mesh.sides[k][2].a};
      return triangle_decomposition(tri, q);
    }
    case CellShape::Rectangle: {
      const Vec2 o = mesh.sides[k][0].a;
      return rectangle_decomposition(o, mesh.sides[k][0].b - o, mesh.sides[k][3].a - o, q);
    }
    case CellShape::Polygon:
      break;
  }
  throw UnsupportedOrder("high-order decomposition is only available for intervals, "
                         "rectangles and triangles");
}

}  // namespace pcp
