#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pcp/eos.hpp"
#include "pcp/limiter.hpp"
#include "pcp/mesh.hpp"
#include "pcp/quadrature.hpp"
#include "pcp/state.hpp"

namespace pcp {

/// Piecewise P0 or P1 solution; P0 cells simply carry zero gradients.
struct FieldSolution {
  std::vector<CellPolynomial> cells;
  double t = 0.0;
  long n = 0;

  std::size_t size() const { return cells.size(); }
  std::vector<ConservedState> averages() const;
  ConservedState eval(std::size_t k, Vec2 x) const { return cells[k].at(x); }
  static FieldSolution from_averages(const PolytopeMesh &mesh, const std::vector<ConservedState> &u);
};

struct CflPolicy {
  double sigma = 0.9;  ///< fraction of the admissible time step
  double alpha = 1.0;  ///< LxF dissipation, >= 1
};

enum class SchemeMode { FirstOrder, HighOrder };

struct SchemeOptions {
  SchemeMode mode = SchemeMode::FirstOrder;
  bool divfree_B = true;  ///< locally divergence-free magnetic reconstruction
  bool limit_slopes = true;
  double eps = kDefaultEpsilon;
  int Q = 1;
  int L = 3;
  int rk_order = 1;
  int threads = 1;
};

/// Per-cell geometric data for the high-order scheme.
struct SchemeGeometry {
  QuadratureSet quad;
  std::vector<CellDecomposition> decomposition;
  /// Face nodes followed by the interior decomposition nodes, per cell.
  std::vector<std::vector<Vec2>> limiter_nodes;
};

SchemeGeometry build_scheme_geometry(const PolytopeMesh &mesh, int Q, int L);

/// Admissible dt of cell k: 2|I_k| / (alpha sum|E|), times beta_k for the
/// high-order scheme.
double cfl_bound(const PolytopeMesh &mesh, std::size_t k, double alpha, double beta = 1.0);

/// sigma * min_k bound; sigma = 1 is pulled inside the open bound by a relative 1e-12.
double compute_dt(const PolytopeMesh &mesh, const CflPolicy &cfl, SchemeMode mode,
                  const SchemeGeometry *geo = nullptr);

/// lambda_k = alpha dt sum|E| / (2 |I_k|).
double cfl_number(const PolytopeMesh &mesh, std::size_t k, double alpha, double dt);

/// One forward Euler first-order update without admissibility checks on the
/// result.  Throws StepError if an input average cannot be recovered.
std::vector<ConservedState> first_order_update(const PolytopeMesh &mesh, const EosModel &eos,
                                               const std::vector<ConservedState> &u, double dt,
                                               double alpha, int threads = 1);

/// Cell-average update of a P1 solution with Q-point Gauss face quadrature.
std::vector<ConservedState> high_order_update(const PolytopeMesh &mesh, const EosModel &eos,
                                              const FieldSolution &sol, const Rule1D &gauss,
                                              double dt, double alpha, int threads = 1);

/// Checked first-order step with dt from the CFL policy.
FieldSolution step_first_order(const FieldSolution &sol, const PolytopeMesh &mesh,
                               const EosModel &eos, const CflPolicy &cfl, int threads = 1);

/// Checked high-order forward Euler step: reconstruct, limit, update.
FieldSolution step_high_order(const FieldSolution &sol, const PolytopeMesh &mesh,
                              const EosModel &eos, const CflPolicy &cfl,
                              const SchemeOptions &opt, const SchemeGeometry &geo);

/// Least-squares P1 reconstruction with Barth-Jespersen (minmod-type) limiting.
/// Outflow sides are ignored.  In divfree mode B1 and B2 share the slope b
/// (dB1/dx = b, dB2/dy = -b).
FieldSolution reconstruct_p1(const PolytopeMesh &mesh, const std::vector<ConservedState> &u,
                             bool divfree_B, bool limit = true);

/// Applies the PCP limiter to every cell of a P1 solution.
FieldSolution limit_solution(const FieldSolution &sol, const SchemeGeometry &geo, double eps,
                             int threads = 1);

/// Terms of the convex decomposition
///   mean^{n+1} = (1 - 2 beta) W + 2 (beta - lambda) Xi1 + 2 lambda Xi2.
struct DecompositionTerms {
  ConservedState W;
  ConservedState Xi1;
  ConservedState Xi2;
  double beta = 0;
  double lambda = 0;

  ConservedState combine() const;
};

DecompositionTerms decomposition_terms(const PolytopeMesh &mesh, const EosModel &eos,
                                       const FieldSolution &sol, std::size_t k,
                                       const SchemeGeometry &geo, double dt, double alpha);

/// Per-step summary.
struct Diagnostics {
  long n = 0;
  double t = 0, dt = 0;
  double min_rho = 0, min_p = 0, max_W = 0;
  double max_abs_div = 0, max_abs_div_out = 0;
  double mass_total = 0, energy_total = 0;
};

Diagnostics diagnose(const PolytopeMesh &mesh, const EosModel &eos, const FieldSolution &sol,
                     double dt);

void write_diagnostics_header(std::ostream &out);
void write_diagnostics_row(std::ostream &out, const Diagnostics &d);
/// Per-cell dump `cell_id,cx,cy,D,m1,m2,m3,B1,B2,B3,E,rho,v1,v2,v3,p`; primitive
/// columns are NaN where recovery fails.
void write_dump(std::ostream &out, const PolytopeMesh &mesh, const EosModel &eos,
                const FieldSolution &sol);

/// One SSP Runge-Kutta step of order 1, 2 or 3 (Shu-Osher form) with
/// admissibility checked after every stage.  dt is fixed for the whole step.
FieldSolution ssp_advance(const FieldSolution &sol, const PolytopeMesh &mesh, const EosModel &eos,
                          const CflPolicy &cfl, const SchemeOptions &opt,
                          const SchemeGeometry *geo, double dt);

/// Cell averages of a primitive field, using each cell's decomposition rule
/// (a centroid fan of triangles for general polygons).
std::vector<ConservedState> cell_averages(const PolytopeMesh &mesh, const EosModel &eos,
                                          const std::function<PrimitiveState(Vec2)> &field,
                                          int Q = 3, int L = 4);

}  // namespace pcp
