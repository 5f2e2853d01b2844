#include <doctest.h>

#include <cmath>
#include <random>

#include "pcp/divergence.hpp"
#include "pcp/errors.hpp"
#include "pcp/limiter.hpp"
#include "pcp/presets.hpp"
#include "pcp/solver.hpp"

using namespace pcp;

namespace {

struct Cell {
  PolytopeMesh mesh = build_cartesian(2, 2, Bounds{}, BoundaryKind::Periodic);
  SchemeGeometry geo = build_scheme_geometry(mesh, 2, 3);
  const std::vector<Vec2> &nodes() const { return geo.limiter_nodes[0]; }
  Vec2 centroid() const { return mesh.centroid[0]; }
};

double rel_mean_change(const CellPolynomial &a, const CellPolynomial &b) {
  double d = 0.0;
  for (int c = 0; c < 8; ++c) d = std::max(d, std::abs(a.mean[c] - b.mean[c]));
  return d / scale_of(a.mean);
}

}  // namespace

TEST_CASE("density step") {
  const Cell cell;
  const double eps = kDefaultEpsilon;
  CellPolynomial p;
  p.centroid = cell.centroid();
  p.mean = prim_to_cons(EosModel::ideal(5.0 / 3.0), PrimitiveState{});
  double th = 0.0;
  CHECK(limit_density(p, cell.nodes(), eps, &th).gx == p.gx);
  CHECK(th == 1.0);

  // D ranges over [-1, 3] with mean 1: theta = (1 - eps) / (1 - (-1)).
  p.mean.D = 1.0;
  p.gx.D = 8.0;  // half width 0.25 -> +-2
  const CellPolynomial q = limit_density(p, cell.nodes(), eps, &th);
  CHECK(th == doctest::Approx(0.5).epsilon(1e-12));
  double dmin = 1e300;
  for (const Vec2 &x : cell.nodes()) dmin = std::min(dmin, q.at(x).D);
  CHECK(dmin >= eps);
  CHECK(dmin == doctest::Approx(eps).epsilon(1e-2));
  CHECK(q.mean == p.mean);
}

TEST_CASE("q step leaves B untouched") {
  const Cell cell;
  CellPolynomial p;
  p.centroid = cell.centroid();
  p.mean = prim_to_cons(EosModel::ideal(5.0 / 3.0), PrimitiveState{1, {0.5, 0, 0}, {1, 0.5, 0}, 0.1});
  p.gx.m.x = 20.0;
  p.gy.B.y = 3.0;
  p.gx.B.x = -3.0;
  double th = 0.0;
  const CellPolynomial q = limit_q(p, cell.nodes(), kDefaultEpsilon, &th);
  CHECK(th < 1.0);
  CHECK(q.gy.B == p.gy.B);
  CHECK(q.gx.B == p.gx.B);
  for (const Vec2 &x : cell.nodes()) CHECK(q_value(q.at(x)) >= kDefaultEpsilon);
}

TEST_CASE("Psi step and locally divergence-free preservation") {
  const Cell cell;
  const double eps = kDefaultEpsilon;
  CellPolynomial p;
  p.centroid = cell.centroid();
  p.mean = prim_to_cons(EosModel::ideal(5.0 / 3.0), PrimitiveState{1, {0.2, 0.1, 0}, {2, 1, 0}, 0.05});
  p.gx.B.x = 30.0;
  p.gy.B.y = -30.0;
  double th = 0.0;
  const CellPolynomial r = limit_psi(p, cell.nodes(), eps, &th);
  CHECK(th < 1.0);
  for (const Vec2 &x : cell.nodes()) CHECK(psi_eps(r.at(x), eps) >= -1e-10 * scale_of(r.at(x)));
  CHECK(r.gx.B.x == doctest::Approx(th * 30.0));
  CHECK(r.gx.B.x + r.gy.B.y == doctest::Approx(0.0));
  CHECK(rel_mean_change(p, r) <= 1e-14);
}

TEST_CASE("pcp_limit fuzz: admissibility, mean and idempotence") {
  const EosModel e = EosModel::taub_mathews();
  const PolytopeMesh tri = build_triangular(2, 2, Bounds{}, BoundaryKind::Periodic);
  const SchemeGeometry geo = build_scheme_geometry(tri, 2, 3);
  const double eps = kDefaultEpsilon;
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t k = static_cast<std::size_t>(t) % tri.num_cells();
    CellPolynomial p;
    p.centroid = tri.centroid[k];
    p.mean = prim_to_cons(e, random_primitive(rng, StateRanges{1e-3, 1e2, 1e-3, 1e2, 0.99, 5.0}));
    const double amp = std::pow(10.0, 2.0 * u(rng) + 0.5);
    for (int c = 0; c < 8; ++c) {
      p.gx[c] = amp * (std::abs(p.mean[c]) + 0.1 * scale_of(p.mean)) * u(rng);
      p.gy[c] = amp * (std::abs(p.mean[c]) + 0.1 * scale_of(p.mean)) * u(rng);
    }
    LimiterReport r1, r2;
    const CellPolynomial a = pcp_limit(p, geo.limiter_nodes[k], eps, &r1);
    const CellPolynomial b = pcp_limit(a, geo.limiter_nodes[k], eps, &r2);
    CHECK(rel_mean_change(p, a) <= 1e-13);
    CHECK(r2.theta1 == 1.0);
    CHECK(r2.theta2 == 1.0);
    CHECK(r2.theta3 == 1.0);
    CHECK(b.gx == a.gx);
    for (const Vec2 &x : geo.limiter_nodes[k]) {
      const ConservedState v = a.at(x);
      CHECK(v.D >= eps * (1 - 1e-12));
      CHECK(q_value(v) >= eps - 1e-10 * scale_of(v));
      CHECK(psi_eps(v, eps) >= -1e-10 * scale_of(v));
    }
  }
}

TEST_CASE("limiter refuses inadmissible means") {
  const Cell cell;
  CellPolynomial p;
  p.centroid = cell.centroid();
  p.mean.D = 1.0;
  p.mean.m = {3, 4, 0};
  p.mean.E = 5.0;
  CHECK_THROWS_AS(pcp_limit(p, cell.nodes()), AverageInadmissible);
}
