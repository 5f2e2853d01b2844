#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "pcp/vec.hpp"

namespace pcp {

enum class BoundaryKind { Periodic, Outflow };

enum class CellShape { Interval, Rectangle, Triangle, Polygon };

/// One side of a cell as seen from that cell.
struct CellSide {
  int face = -1;
  int neighbor = -1;  ///< -1 on an outflow boundary
  Vec2 normal;        ///< outward unit normal xi_kj
  double length = 0;  ///< |E_kj| (1 for the point faces of 1D meshes)
  Vec2 a;             ///< start point (CCW) in this cell's frame
  Vec2 b;             ///< end point; equals a in 1D
  Vec2 shift;         ///< add to a point of this side to get it in the neighbor's frame
  int neighbor_side = -1;
};

/// Unique face shared by cells left and right (right = -1 on outflow boundaries).
struct Face {
  int left = -1;
  int right = -1;
  int left_side = -1;
  int right_side = -1;
  Vec2 normal;  ///< unit normal pointing from left to right
  double length = 0;
};

/// Polytope mesh in one or two dimensions.
///
/// 1D meshes live on the x axis: every cell is an interval with two point
/// faces of unit measure.
struct PolytopeMesh {
  int dim = 2;
  BoundaryKind boundary = BoundaryKind::Periodic;
  std::vector<Vec2> vertices;
  std::vector<std::vector<int>> cells;  ///< CCW vertex loops (2 vertices in 1D)
  std::vector<Face> faces;
  std::vector<std::vector<CellSide>> sides;
  std::vector<CellShape> shape;
  std::vector<double> measure;
  std::vector<Vec2> centroid;
  std::vector<double> radius;  ///< circumscribed radius per cell
  double max_radius = 0;
  Vec2 period;  ///< translation lengths used for periodic pairing (0 = none)

  std::size_t num_cells() const { return cells.size(); }
  /// Sum of |E_kj| over the sides of cell k.
  double perimeter(std::size_t k) const;
  /// Sum of xi_kj |E_kj|; zero for every closed cell.
  Vec2 normal_closure(std::size_t k) const;
  /// Largest side length of cell k.
  double max_side(std::size_t k) const;
};

struct Bounds {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
};

/// Builds a mesh from vertices and CCW polygons.  Boundary edges are paired
/// by the translations (period.x, 0) and (0, period.y) when boundary is periodic.
PolytopeMesh build_polygon_mesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells,
                                BoundaryKind boundary, Vec2 period = {});

PolytopeMesh build_cartesian(int nx, int ny, const Bounds &b, BoundaryKind boundary);
PolytopeMesh build_interval(int nx, double x0, double x1, BoundaryKind boundary);
/// Cartesian grid with each cell split along its (x0,y0)-(x1,y1) diagonal.
PolytopeMesh build_triangular(int nx, int ny, const Bounds &b, BoundaryKind boundary);

/// ASCII mesh: `nv nc`, nv lines `x y`, nc lines `deg i1 ... ideg` (0-based, CCW).
PolytopeMesh read_mesh(std::istream &in, BoundaryKind boundary, Vec2 period = {});
PolytopeMesh read_mesh(const std::filesystem::path &path, BoundaryKind boundary,
                       Vec2 period = {});
void write_mesh(std::ostream &out, const PolytopeMesh &mesh);

/// Circumscribed radius: abc/(4A) for triangles, otherwise the largest
/// centroid-vertex distance.
double circumradius(const std::vector<Vec2> &polygon);

}  // namespace pcp
