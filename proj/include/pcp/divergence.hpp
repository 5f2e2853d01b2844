#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "pcp/mesh.hpp"
#include "pcp/quadrature.hpp"
#include "pcp/vec.hpp"

namespace pcp {

/// Per-cell discrete divergences: centered, inner trace, outer trace.
struct DivergenceRow {
  double div = 0;
  double div_in = 0;
  double div_out = 0;
};

/// Discrete divergences of a piecewise-polynomial magnetic field.
///
/// eval(k, x) returns B of cell k at the point x given in cell k's own frame.
/// Outflow sides use the interior trace for the missing neighbor.
template <class Eval>
std::vector<DivergenceRow> discrete_divergence(const PolytopeMesh &mesh, const Rule1D &gauss,
                                               Eval &&eval) {
  std::vector<DivergenceRow> out(mesh.num_cells());
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    DivergenceRow r;
    for (const CellSide &s : mesh.sides[k]) {
      const Vec3 n = lift(s.normal);
      const auto xs = side_nodes(s, gauss);
      const bool point = xs.size() == 1;
      double in = 0.0;
      double ou = 0.0;
      for (std::size_t mu = 0; mu < xs.size(); ++mu) {
        const double w = point ? 1.0 : gauss.weights[mu];
        const double bk = dot(n, eval(k, xs[mu]));
        const double bj = s.neighbor >= 0
                              ? dot(n, eval(static_cast<std::size_t>(s.neighbor), xs[mu] + s.shift))
                              : bk;
        in += w * bk;
        ou += w * bj;
      }
      r.div_in += in * s.length;
      r.div_out += ou * s.length;
      r.div += 0.5 * (in + ou) * s.length;
    }
    out[k] = r;
  }
  return out;
}

/// First-order divergences of cell-constant fields.
std::vector<DivergenceRow> discrete_divergence(const PolytopeMesh &mesh,
                                               const std::vector<Vec3> &cell_B);

/// CSV with header `cell_id,div,div_in,div_out`.
void write_divergence_csv(std::ostream &out, const std::vector<DivergenceRow> &rows);

}  // namespace pcp
