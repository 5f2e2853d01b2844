#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "pcp/mesh.hpp"
#include "pcp/vec.hpp"

namespace pcp {

/// Nodes and weights on the reference interval [-1/2, 1/2], weights summing to 1.
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Q-point Gauss-Legendre rule, 1 <= Q <= 10.
Rule1D gauss_rule(int Q);
/// L-point Gauss-Lobatto rule, 2 <= L <= 10.
Rule1D lobatto_rule(int L);

struct QuadratureSet {
  int Q = 1;
  int L = 2;
  Rule1D gauss;
  Rule1D lobatto;

  /// First Gauss-Lobatto weight (the boundary weight).
  double omega_hat1() const { return lobatto.weights.front(); }
};

/// Throws UnsupportedOrder outside 1 <= Q <= 10, 2 <= L <= 10.
QuadratureSet gauss_rules(int Q, int L);

/// Smallest Gauss-Lobatto size with L >= (K + 3)/2 and L >= 3.
int lobatto_size_for_degree(int K);

/// Physical Gauss nodes on one side (a single point in 1D).
std::vector<Vec2> side_nodes(const CellSide &side, const Rule1D &gauss);

struct WeightedNode {
  Vec2 x;
  double w = 0;
};

/// Convex decomposition of a cell average:
///   mean = sum_j side_weight[j] sum_mu omega_mu U(x_kj^mu) + sum_interior w U(x).
struct CellDecomposition {
  std::vector<double> side_weight;
  std::vector<WeightedNode> interior;
  /// min_j side_weight[j] * perimeter / (2 |E_j|), the admissible CFL number.
  double beta = 0;

  double total_weight() const;
};

/// Three barycentric families of the collapsed Gauss x Gauss-Lobatto rule,
/// each weighted 1/3.  Throws DegenerateCell for nonpositive area.
CellDecomposition triangle_decomposition(const std::array<Vec2, 3> &tri, const QuadratureSet &q);

/// (GL_x x G_y) u (G_x x GL_y) on the rectangle with corner o and edge vectors ex, ey.
CellDecomposition rectangle_decomposition(Vec2 o, Vec2 ex, Vec2 ey, const QuadratureSet &q);

/// Gauss-Lobatto nodes of an interval.
CellDecomposition interval_decomposition(double x0, double x1, const QuadratureSet &q);

/// Decomposition of cell k of a mesh.  Throws UnsupportedOrder for general polygons.
CellDecomposition decompose_cell(const PolytopeMesh &mesh, std::size_t k, const QuadratureSet &q);

}  // namespace pcp
