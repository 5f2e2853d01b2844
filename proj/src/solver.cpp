#include "pcp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "pcp/divergence.hpp"
#include "pcp/errors.hpp"
#include "pcp/flux.hpp"
#include "pcp/parallel.hpp"
#include "pcp/recovery.hpp"

namespace pcp {
namespace {

struct Recovered {
  PrimitiveState V;
  bool ok = false;
};

// Recovers every average; the first failing cell (lowest index) is reported.
std::vector<PrimitiveState> recover_all(const EosModel &eos, const std::vector<ConservedState> &u,
                                        int threads, const char *what) {
  std::vector<Recovered> r(u.size());
  parallel_for(u.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      try {
        if (is_admissible_g0(u[k])) {
          r[k].V = recover_primitives(eos, u[k]);
          r[k].ok = true;
        }
      } catch (const Error &) {
        r[k].ok = false;
      }
    }
  });
  std::vector<PrimitiveState> out(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!r[k].ok) {
      std::ostringstream os;
      os << what << ": cell " << k << " is not admissible (D=" << u[k].D << ", E=" << u[k].E
         << ")";
      throw StepError(os.str(), static_cast<long>(k));
    }
    out[k] = r[k].V;
  }
  return out;
}

FluxVector checked_lxf(const EosModel &eos, const ConservedState &UL, const ConservedState &UR,
                       const Vec3 &n, double alpha, bool outflow, long cell) {
  try {
    const PrimitiveState VL = recover_primitives(eos, UL);
    if (outflow) return directed_flux(VL, UL, n);
    const PrimitiveState VR = recover_primitives(eos, UR);
    return lxf_flux(VL, UL, VR, UR, n, alpha);
  } catch (const Error &e) {
    std::ostringstream os;
    os << "face trace of cell " << cell << " not recoverable: " << e.what();
    throw StepError(os.str(), cell);
  }
}

template <class F>
ConservedState decomposition_average(const CellDecomposition &d,
                                     const std::vector<std::pair<Vec2, Vec2>> &edges,
                                     const Rule1D &gauss, F &&f) {
  ConservedState s;
  for (std::size_t j = 0; j < edges.size(); ++j) {
    CellSide side;
    side.a = edges[j].first;
    side.b = edges[j].second;
    const auto xs = side_nodes(side, gauss);
    ConservedState e;
    for (std::size_t mu = 0; mu < xs.size(); ++mu) {
      e += (xs.size() == 1 ? 1.0 : gauss.weights[mu]) * f(xs[mu]);
    }
    s += d.side_weight[j] * e;
  }
  for (const auto &n : d.interior) s += n.w * f(n.x);
  return s;
}

void require_alpha(double alpha) {
  if (!(alpha >= 1.0)) throw ConfigError("alpha must be >= 1");
}

}  // namespace

std::vector<ConservedState> FieldSolution::averages() const {
  std::vector<ConservedState> u(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) u[k] = cells[k].mean;
  return u;
}

FieldSolution FieldSolution::from_averages(const PolytopeMesh &mesh,
                                           const std::vector<ConservedState> &u) {
  FieldSolution s;
  s.cells.resize(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    s.cells[k].mean = u[k];
    s.cells[k].centroid = mesh.centroid[k];
  }
  return s;
}

SchemeGeometry build_scheme_geometry(const PolytopeMesh &mesh, int Q, int L) {
  SchemeGeometry g;
  g.quad = gauss_rules(Q, L);
  g.decomposition.reserve(mesh.num_cells());
  g.limiter_nodes.resize(mesh.num_cells());
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    g.decomposition.push_back(decompose_cell(mesh, k, g.quad));
    auto &nodes = g.limiter_nodes[k];
    for (const CellSide &s : mesh.sides[k]) {
      for (const Vec2 &x : side_nodes(s, g.quad.gauss)) nodes.push_back(x);
    }
    for (const auto &n : g.decomposition.back().interior) nodes.push_back(n.x);
  }
  return g;
}

double cfl_bound(const PolytopeMesh &mesh, std::size_t k, double alpha, double beta) {
  return beta * 2.0 * mesh.measure[k] / (alpha * mesh.perimeter(k));
}

double cfl_number(const PolytopeMesh &mesh, std::size_t k, double alpha, double dt) {
  return alpha * dt * mesh.perimeter(k) / (2.0 * mesh.measure[k]);
}

double compute_dt(const PolytopeMesh &mesh, const CflPolicy &cfl, SchemeMode mode,
                  const SchemeGeometry *geo) {
  require_alpha(cfl.alpha);
  if (!(cfl.sigma > 0.0)) throw ConfigError("CFL fraction must be positive");
  if (mode == SchemeMode::HighOrder && !geo) {
    throw ConfigError("high-order time step needs the scheme geometry");
  }
  double b = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const double beta = mode == SchemeMode::HighOrder ? geo->decomposition[k].beta : 1.0;
    b = std::min(b, cfl_bound(mesh, k, cfl.alpha, beta));
  }
  const double s = cfl.sigma == 1.0 ? 1.0 - 1e-12 : cfl.sigma;
  return s * b;
}

std::vector<ConservedState> first_order_update(const PolytopeMesh &mesh, const EosModel &eos,
                                               const std::vector<ConservedState> &u, double dt,
                                               double alpha, int threads) {
  require_alpha(alpha);
  const std::vector<PrimitiveState> V = recover_all(eos, u, threads, "first-order update");
  std::vector<FluxVector> flux(mesh.faces.size());
  parallel_for(mesh.faces.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t f = b; f < e; ++f) {
      const Face &face = mesh.faces[f];
      const Vec3 n = lift(face.normal);
      const auto l = static_cast<std::size_t>(face.left);
      if (face.right < 0) {
        flux[f] = directed_flux(V[l], u[l], n);
      } else {
        const auto r = static_cast<std::size_t>(face.right);
        flux[f] = lxf_flux(V[l], u[l], V[r], u[r], n, alpha);
      }
    }
  });
  std::vector<ConservedState> res(u.size());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face &face = mesh.faces[f];
    const FluxVector lf = face.length * flux[f];
    res[static_cast<std::size_t>(face.left)] += lf;
    if (face.right >= 0) res[static_cast<std::size_t>(face.right)] -= lf;
  }
  std::vector<ConservedState> out(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) out[k] = u[k] - (dt / mesh.measure[k]) * res[k];
  return out;
}

std::vector<ConservedState> high_order_update(const PolytopeMesh &mesh, const EosModel &eos,
                                              const FieldSolution &sol, const Rule1D &gauss,
                                              double dt, double alpha, int threads) {
  require_alpha(alpha);
  std::vector<FluxVector> flux(mesh.faces.size());
  parallel_for(mesh.faces.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t f = b; f < e; ++f) {
      const Face &face = mesh.faces[f];
      const auto l = static_cast<std::size_t>(face.left);
      const CellSide &side = mesh.sides[l][static_cast<std::size_t>(face.left_side)];
      const Vec3 n = lift(face.normal);
      const auto xs = side_nodes(side, gauss);
      FluxVector F;
      for (std::size_t mu = 0; mu < xs.size(); ++mu) {
        const double w = xs.size() == 1 ? 1.0 : gauss.weights[mu];
        const ConservedState UL = sol.eval(l, xs[mu]);
        const ConservedState UR = face.right >= 0
                                      ? sol.eval(static_cast<std::size_t>(face.right), xs[mu] + side.shift)
                                      : UL;
        F += w * checked_lxf(eos, UL, UR, n, alpha, face.right < 0, face.left);
      }
      flux[f] = F;
    }
  });
  std::vector<ConservedState> res(mesh.num_cells());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face &face = mesh.faces[f];
    const FluxVector lf = face.length * flux[f];
    res[static_cast<std::size_t>(face.left)] += lf;
    if (face.right >= 0) res[static_cast<std::size_t>(face.right)] -= lf;
  }
  std::vector<ConservedState> out(mesh.num_cells());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = sol.cells[k].mean - (dt / mesh.measure[k]) * res[k];
  }
  return out;
}

FieldSolution step_first_order(const FieldSolution &sol, const PolytopeMesh &mesh,
                               const EosModel &eos, const CflPolicy &cfl, int threads) {
  const double dt = compute_dt(mesh, cfl, SchemeMode::FirstOrder);
  const auto u = first_order_update(mesh, eos, sol.averages(), dt, cfl.alpha, threads);
  recover_all(eos, u, threads, "first-order step");
  FieldSolution out = FieldSolution::from_averages(mesh, u);
  out.t = sol.t + dt;
  out.n = sol.n + 1;
  return out;
}

FieldSolution reconstruct_p1(const PolytopeMesh &mesh, const std::vector<ConservedState> &u,
                             bool divfree_B, bool limit) {
  FieldSolution s = FieldSolution::from_averages(mesh, u);
  const bool one_d = mesh.dim == 1;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const Vec2 c = mesh.centroid[k];
    double a11 = 0, a12 = 0, a22 = 0;
    ConservedState rx, ry;
    double umax[8], umin[8];
    for (int i = 0; i < 8; ++i) umax[i] = umin[i] = u[k][i];
    int count = 0;
    for (const CellSide &side : mesh.sides[k]) {
      if (side.neighbor < 0) continue;
      const auto j = static_cast<std::size_t>(side.neighbor);
      const Vec2 d = mesh.centroid[j] - side.shift - c;
      const double w = 1.0 / dot(d, d);
      a11 += w * d.x * d.x;
      a12 += w * d.x * d.y;
      a22 += w * d.y * d.y;
      const ConservedState du = u[j] - u[k];
      rx += (w * d.x) * du;
      ry += (w * d.y) * du;
      for (int i = 0; i < 8; ++i) {
        umax[i] = std::max(umax[i], u[j][i]);
        umin[i] = std::min(umin[i], u[j][i]);
      }
      ++count;
    }
    ConservedState gx, gy;
    if (one_d) {
      if (count > 0 && a11 > 0.0) gx = (1.0 / a11) * rx;
    } else {
      const double det = a11 * a22 - a12 * a12;
      if (count >= 2 && det > 1e-12 * (a11 + a22) * (a11 + a22)) {
        gx = (1.0 / det) * (a22 * rx - a12 * ry);
        gy = (1.0 / det) * (a11 * ry - a12 * rx);
      }
    }
    if (divfree_B) {
      if (one_d) {
        gx.B.x = 0.0;
      } else {
        const double b = 0.5 * (gx.B.x - gy.B.y);
        gx.B.x = b;
        gy.B.y = -b;
      }
    }
    if (limit) {
      // Barth-Jespersen factor per component over the cell vertices.
      double phi[8];
      for (int i = 0; i < 8; ++i) phi[i] = 1.0;
      auto corners = [&](auto &&fn) {
        if (one_d) {
          fn(mesh.sides[k][0].a);
          fn(mesh.sides[k][1].a);
        } else {
          for (const CellSide &side : mesh.sides[k]) fn(side.a);
        }
      };
      corners([&](Vec2 x) {
        const Vec2 d = x - c;
        for (int i = 0; i < 8; ++i) {
          const double delta = gx[i] * d.x + gy[i] * d.y;
          if (delta > 0.0) phi[i] = std::min(phi[i], (umax[i] - u[k][i]) / delta);
          else if (delta < 0.0) phi[i] = std::min(phi[i], (umin[i] - u[k][i]) / delta);
        }
      });
      if (divfree_B) phi[4] = phi[5] = std::min(phi[4], phi[5]);
      for (int i = 0; i < 8; ++i) {
        const double p = std::clamp(phi[i], 0.0, 1.0);
        gx[i] *= p;
        gy[i] *= p;
      }
    }
    s.cells[k].gx = gx;
    s.cells[k].gy = gy;
  }
  return s;
}

FieldSolution limit_solution(const FieldSolution &sol, const SchemeGeometry &geo, double eps,
                             int threads) {
  FieldSolution out = sol;
  std::vector<long> bad(sol.size(), 0);
  std::vector<std::string> msg(sol.size());
  parallel_for(sol.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      try {
        out.cells[k] = pcp_limit(sol.cells[k], geo.limiter_nodes[k], eps);
      } catch (const Error &ex) {
        bad[k] = 1;
        msg[k] = ex.what();
      }
    }
  });
  for (std::size_t k = 0; k < sol.size(); ++k) {
    if (bad[k]) {
      std::ostringstream os;
      os << "limiter failed in cell " << k << ": " << msg[k];
      throw StepError(os.str(), static_cast<long>(k));
    }
  }
  return out;
}

FieldSolution step_high_order(const FieldSolution &sol, const PolytopeMesh &mesh,
                              const EosModel &eos, const CflPolicy &cfl,
                              const SchemeOptions &opt, const SchemeGeometry &geo) {
  SchemeOptions o = opt;
  o.mode = SchemeMode::HighOrder;
  o.rk_order = 1;
  const double dt = compute_dt(mesh, cfl, SchemeMode::HighOrder, &geo);
  return ssp_advance(sol, mesh, eos, cfl, o, &geo, dt);
}

ConservedState DecompositionTerms::combine() const {
  return (1.0 - 2.0 * beta) * W + (2.0 * (beta - lambda)) * Xi1 + (2.0 * lambda) * Xi2;
}

DecompositionTerms decomposition_terms(const PolytopeMesh &mesh, const EosModel &eos,
                                       const FieldSolution &sol, std::size_t k,
                                       const SchemeGeometry &geo, double dt, double alpha) {
  require_alpha(alpha);
  DecompositionTerms t;
  t.beta = geo.decomposition[k].beta;
  t.lambda = cfl_number(mesh, k, alpha, dt);
  const double P = mesh.perimeter(k);
  const Rule1D &gauss = geo.quad.gauss;
  ConservedState xi1, xi2;
  for (const CellSide &side : mesh.sides[k]) {
    const Vec3 n = lift(side.normal);
    const auto xs = side_nodes(side, gauss);
    for (std::size_t mu = 0; mu < xs.size(); ++mu) {
      const double w = (xs.size() == 1 ? 1.0 : gauss.weights[mu]) * side.length;
      const ConservedState Uk = sol.eval(k, xs[mu]);
      const ConservedState Uj =
          side.neighbor >= 0 ? sol.eval(static_cast<std::size_t>(side.neighbor), xs[mu] + side.shift)
                             : Uk;
      xi1 += w * Uk;
      xi2 += w * (Uk - (1.0 / alpha) * directed_flux(recover_primitives(eos, Uk), Uk, n));
      xi2 += w * (Uj - (1.0 / alpha) * directed_flux(recover_primitives(eos, Uj), Uj, n));
    }
  }
  t.Xi1 = (1.0 / P) * xi1;
  t.Xi2 = (0.5 / P) * xi2;
  t.W = (1.0 / (1.0 - 2.0 * t.beta)) * (sol.cells[k].mean - (2.0 * t.beta) * t.Xi1);
  return t;
}

Diagnostics diagnose(const PolytopeMesh &mesh, const EosModel &eos, const FieldSolution &sol,
                     double dt) {
  Diagnostics d;
  d.n = sol.n;
  d.t = sol.t;
  d.dt = dt;
  d.min_rho = d.min_p = std::numeric_limits<double>::infinity();
  d.max_W = 0.0;
  std::vector<Vec3> B(sol.size());
  for (std::size_t k = 0; k < sol.size(); ++k) {
    const ConservedState &u = sol.cells[k].mean;
    B[k] = u.B;
    d.mass_total += mesh.measure[k] * u.D;
    d.energy_total += mesh.measure[k] * u.E;
    try {
      const PrimitiveState V = recover_primitives(eos, u);
      d.min_rho = std::min(d.min_rho, V.rho);
      d.min_p = std::min(d.min_p, V.p);
      d.max_W = std::max(d.max_W, lorentz_factor(V.v));
    } catch (const Error &) {
      d.min_rho = std::min(d.min_rho, -std::numeric_limits<double>::infinity());
      d.min_p = -std::numeric_limits<double>::infinity();
    }
  }
  for (const auto &r : discrete_divergence(mesh, B)) {
    d.max_abs_div = std::max(d.max_abs_div, std::abs(r.div));
    d.max_abs_div_out = std::max(d.max_abs_div_out, std::abs(r.div_out));
  }
  return d;
}

void write_diagnostics_header(std::ostream &out) {
  out << "n,t,dt,min_rho,min_p,max_W,max_abs_div,max_abs_div_out,mass_total,energy_total\n";
}

void write_diagnostics_row(std::ostream &out, const Diagnostics &d) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                d.n, d.t, d.dt, d.min_rho, d.min_p, d.max_W, d.max_abs_div, d.max_abs_div_out,
                d.mass_total, d.energy_total);
  out << buf;
}

void write_dump(std::ostream &out, const PolytopeMesh &mesh, const EosModel &eos,
                const FieldSolution &sol) {
  out << "cell_id,cx,cy,D,m1,m2,m3,B1,B2,B3,E,rho,v1,v2,v3,p\n";
  char buf[1024];
  for (std::size_t k = 0; k < sol.size(); ++k) {
    const ConservedState &u = sol.cells[k].mean;
    PrimitiveState V{std::nan(""), {std::nan(""), std::nan(""), std::nan("")}, u.B, std::nan("")};
    try {
      V = recover_primitives(eos, u);
    } catch (const Error &) {
    }
    std::snprintf(buf, sizeof buf,
                  "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%.17g,%.17g\n",
                  k, mesh.centroid[k].x, mesh.centroid[k].y, u.D, u.m.x, u.m.y, u.m.z, u.B.x,
                  u.B.y, u.B.z, u.E, V.rho, V.v.x, V.v.y, V.v.z, V.p);
    out << buf;
  }
}

FieldSolution ssp_advance(const FieldSolution &sol, const PolytopeMesh &mesh, const EosModel &eos,
                          const CflPolicy &cfl, const SchemeOptions &opt,
                          const SchemeGeometry *geo, double dt) {
  if (opt.rk_order < 1 || opt.rk_order > 3) throw ConfigError("SSP order must be 1, 2 or 3");
  const bool high = opt.mode == SchemeMode::HighOrder;
  if (high && !geo) throw ConfigError("high-order stages need the scheme geometry");

  auto euler = [&](const std::vector<ConservedState> &u) {
    if (!high) return first_order_update(mesh, eos, u, dt, cfl.alpha, opt.threads);
    FieldSolution p = reconstruct_p1(mesh, u, opt.divfree_B, opt.limit_slopes);
    p = limit_solution(p, *geo, opt.eps, opt.threads);
    return high_order_update(mesh, eos, p, geo->quad.gauss, dt, cfl.alpha, opt.threads);
  };
  auto blend = [](double a, const std::vector<ConservedState> &x, double b,
                  const std::vector<ConservedState> &y) {
    std::vector<ConservedState> r(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) r[k] = a * x[k] + b * y[k];
    return r;
  };
  auto check = [&](const std::vector<ConservedState> &u, const char *stage) {
    recover_all(eos, u, opt.threads, stage);
  };

  const std::vector<ConservedState> u0 = sol.averages();
  std::vector<ConservedState> u = euler(u0);
  check(u, "SSP stage 1");
  if (opt.rk_order == 2) {
    u = blend(0.5, u0, 0.5, euler(u));
    check(u, "SSP stage 2");
  } else if (opt.rk_order == 3) {
    u = blend(0.75, u0, 0.25, euler(u));
    check(u, "SSP stage 2");
    u = blend(1.0 / 3.0, u0, 2.0 / 3.0, euler(u));
    check(u, "SSP stage 3");
  }
  FieldSolution out = FieldSolution::from_averages(mesh, u);
  out.t = sol.t + dt;
  out.n = sol.n + 1;
  return out;
}

std::vector<ConservedState> cell_averages(const PolytopeMesh &mesh, const EosModel &eos,
                                          const std::function<PrimitiveState(Vec2)> &field,
                                          int Q, int L) {
  const QuadratureSet q = gauss_rules(Q, L);
  auto f = [&](Vec2 x) { return prim_to_cons(eos, field(x)); };
  std::vector<ConservedState> u(mesh.num_cells());
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    std::vector<std::pair<Vec2, Vec2>> edges;
    for (const CellSide &s : mesh.sides[k]) edges.emplace_back(s.a, s.b);
    if (mesh.shape[k] != CellShape::Polygon) {
      u[k] = decomposition_average(decompose_cell(mesh, k, q), edges, q.gauss, f);
      continue;
    }
    const Vec2 c = mesh.centroid[k];
    ConservedState s;
    for (const auto &[a, b] : edges) {
      const double area = 0.5 * cross(a - c, b - c);
      const auto d = triangle_decomposition({c, a, b}, q);
      s += (area / mesh.measure[k]) *
           decomposition_average(d, {{c, a}, {a, b}, {b, c}}, q.gauss, f);
    }
    u[k] = s;
  }
  return u;
}

}  // namespace pcp
