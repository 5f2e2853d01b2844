#include "pcp/divergence.hpp"

#include <cstdio>
#include <ostream>

namespace pcp {

std::vector<DivergenceRow> discrete_divergence(const PolytopeMesh &mesh,
                                               const std::vector<Vec3> &cell_B) {
  static const Rule1D one = gauss_rule(1);
  return discrete_divergence(mesh, one, [&](std::size_t k, Vec2) { return cell_B[k]; });
}

void write_divergence_csv(std::ostream &out, const std::vector<DivergenceRow> &rows) {
  out << "cell_id,div,div_in,div_out\n";
  char buf[128];
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", k, rows[k].div, rows[k].div_in,
                  rows[k].div_out);
    out << buf;
  }
}

}  // namespace pcp
