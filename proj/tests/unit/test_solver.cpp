#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "pcp/divergence.hpp"
#include "pcp/errors.hpp"
#include "pcp/presets.hpp"
#include "pcp/recovery.hpp"
#include "pcp/solver.hpp"

using namespace pcp;

namespace {

double max_rel(const std::vector<ConservedState> &a, const std::vector<ConservedState> &b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (int c = 0; c < 8; ++c) d = std::max(d, std::abs(a[k][c] - b[k][c]) / scale_of(a[k]));
  }
  return d;
}

}  // namespace

TEST_CASE("time step bounds") {
  const PolytopeMesh m = build_cartesian(10, 5, Bounds{0, 1, 0, 1}, BoundaryKind::Periodic);
  const double dx = 0.1, dy = 0.2;
  const double dt = compute_dt(m, CflPolicy{0.9, 1.0}, SchemeMode::FirstOrder);
  CHECK(dt == doctest::Approx(0.9 * 2 * dx * dy / (2 * dx + 2 * dy)).epsilon(1e-14));
  const SchemeGeometry geo = build_scheme_geometry(m, 1, 3);
  const double hi = compute_dt(m, CflPolicy{1.0, 1.0}, SchemeMode::HighOrder, &geo);
  CHECK(hi < (1.0 / 6.0) / (1.0 / dx + 1.0 / dy));
  CHECK(hi == doctest::Approx((1.0 / 6.0) / (1.0 / dx + 1.0 / dy)).epsilon(1e-11));
  CHECK(cfl_number(m, 0, 1.0, dt) == doctest::Approx(0.9));
}

TEST_CASE("uniform state is stationary") {
  const EosModel e = EosModel::ideal(5.0 / 3.0);
  for (const PolytopeMesh &m : {build_cartesian(6, 6, Bounds{}, BoundaryKind::Periodic),
                                build_triangular(5, 4, Bounds{}, BoundaryKind::Periodic)}) {
    const ConservedState U = prim_to_cons(e, PrimitiveState{1.3, {0.2, -0.4, 0.1}, {0.5, 0.7, -0.2}, 0.9});
    const std::vector<ConservedState> u(m.num_cells(), U);
    const double dt = compute_dt(m, CflPolicy{}, SchemeMode::FirstOrder);
    CHECK(max_rel(u, first_order_update(m, e, u, dt, 1.0)) < 1e-14);
    const SchemeGeometry geo = build_scheme_geometry(m, 2, 3);
    SchemeOptions opt;
    opt.mode = SchemeMode::HighOrder;
    for (int order = 1; order <= 3; ++order) {
      opt.rk_order = order;
      const FieldSolution s = ssp_advance(FieldSolution::from_averages(m, u), m, e, CflPolicy{}, opt, &geo,
                                          compute_dt(m, CflPolicy{}, SchemeMode::HighOrder, &geo));
      CHECK(max_rel(u, s.averages()) < 1e-14);
    }
  }
}

TEST_CASE("zero slopes reproduce the first-order step") {
  const EosModel e = EosModel::ideal(4.0 / 3.0);
  const PolytopeMesh m = build_cartesian(8, 8, Bounds{}, BoundaryKind::Periodic);
  std::mt19937_64 rng(61);
  const auto u = random_admissible_ddf(m, e, rng);
  const SchemeGeometry geo = build_scheme_geometry(m, 2, 3);
  const double dt = compute_dt(m, CflPolicy{}, SchemeMode::HighOrder, &geo);
  const auto a = first_order_update(m, e, u, dt, 1.0);
  const auto b = high_order_update(m, e, FieldSolution::from_averages(m, u), geo.quad.gauss, dt, 1.0);
  CHECK(max_rel(a, b) < 1e-13);
}

TEST_CASE("first-order PCP on DDF data") {
  const EosModel e = EosModel::taub_mathews();
  const PolytopeMesh m = build_cartesian(16, 16, Bounds{}, BoundaryKind::Periodic);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    FieldSolution s = FieldSolution::from_averages(m, random_admissible_ddf(m, e, rng));
    for (int n = 0; n < 20; ++n) s = step_first_order(s, m, e, CflPolicy{0.95, 1.0});
    for (const auto &x : s.averages()) CHECK(is_admissible_g0(x));
  }
}

TEST_CASE("P1 reconstruction") {
  const PolytopeMesh m = build_cartesian(8, 8, Bounds{}, BoundaryKind::Outflow);
  std::vector<ConservedState> u(m.num_cells());
  for (std::size_t k = 0; k < u.size(); ++k) {
    const Vec2 c = m.centroid[k];
    u[k].D = 2.0 + 0.5 * c.x - 0.25 * c.y;
    u[k].E = 10.0;
  }
  const FieldSolution p = reconstruct_p1(m, u, true, false);
  for (std::size_t k = 0; k < u.size(); ++k) {
    CHECK(p.cells[k].gx.D == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.cells[k].gy.D == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(p.cells[k].gx.E == 0.0);
  }
  // Div-free mode on a random field: div_in vanishes per cell.
  std::mt19937_64 rng(62);
  const PolytopeMesh t = build_triangular(6, 6, Bounds{}, BoundaryKind::Periodic);
  std::vector<ConservedState> w;
  for (std::size_t k = 0; k < t.num_cells(); ++k) {
    w.push_back(prim_to_cons(EosModel::ideal(5.0 / 3.0), random_primitive(rng, StateRanges{})));
  }
  const FieldSolution q = reconstruct_p1(t, w, true, true);
  const auto div = discrete_divergence(t, gauss_rule(2), [&](std::size_t k, Vec2 x) { return q.eval(k, x).B; });
  for (const auto &r : div) CHECK(std::abs(r.div_in) < 1e-13);
}

TEST_CASE("decomposition identity") {
  const EosModel e = EosModel::ideal(5.0 / 3.0);
  for (const PolytopeMesh &m : {build_cartesian(8, 8, Bounds{}, BoundaryKind::Periodic),
                                build_triangular(6, 6, Bounds{}, BoundaryKind::Periodic)}) {
    std::mt19937_64 rng(63);
    const auto u = random_admissible_ddf(m, e, rng);
    const SchemeGeometry geo = build_scheme_geometry(m, 2, 3);
    FieldSolution p = limit_solution(reconstruct_p1(m, u, true, true), geo, kDefaultEpsilon);
    const double dt = compute_dt(m, CflPolicy{}, SchemeMode::HighOrder, &geo);
    const auto next = high_order_update(m, e, p, geo.quad.gauss, dt, 1.0);
    for (std::size_t k = 0; k < m.num_cells(); ++k) {
      const DecompositionTerms t = decomposition_terms(m, e, p, k, geo, dt, 1.0);
      CHECK(t.lambda <= t.beta);
      const ConservedState c = t.combine();
      for (int i = 0; i < 8; ++i) CHECK(std::abs(c[i] - next[k][i]) <= 1e-12 * scale_of(next[k]));
      CHECK(is_admissible_g0(t.W));
      CHECK(is_admissible_g0(next[k]));
    }
  }
}

TEST_CASE("SSP order outside 1..3 is rejected") {
  const PolytopeMesh m = build_cartesian(4, 4, Bounds{}, BoundaryKind::Periodic);
  SchemeOptions opt;
  opt.rk_order = 4;
  const std::vector<ConservedState> u(m.num_cells(), prim_to_cons(EosModel::ideal(2.0), PrimitiveState{}));
  CHECK_THROWS_AS(ssp_advance(FieldSolution::from_averages(m, u), m, EosModel::ideal(2.0), CflPolicy{}, opt,
                              nullptr, 0.01),
                  ConfigError);
}

TEST_CASE("inadmissible input is reported with its cell") {
  const EosModel e = EosModel::ideal(5.0 / 3.0);
  const PolytopeMesh m = build_cartesian(4, 4, Bounds{}, BoundaryKind::Periodic);
  std::vector<ConservedState> u(m.num_cells(), prim_to_cons(e, PrimitiveState{}));
  u[5].E = 0.1;
  try {
    first_order_update(m, e, u, 0.01, 1.0);
    FAIL("expected StepError");
  } catch (const StepError &err) {
    CHECK(err.cell() == 5);
  }
}

TEST_CASE("SSP stages are consistent with forward Euler") {
  // On smooth data RK2 and RK3 agree with Euler to O(dt^2) and with each other to O(dt^3).
  const EosModel e = EosModel::ideal(5.0 / 3.0);
  const PolytopeMesh m = build_cartesian(16, 16, Bounds{}, BoundaryKind::Periodic);
  const auto u = cell_averages(m, e, preset_initial_condition("smooth-vortex-like", {}));
  const FieldSolution s = FieldSolution::from_averages(m, u);
  SchemeOptions opt;
  double prev12 = 0.0, prev23 = 0.0;
  for (double dt : {4e-3, 2e-3}) {
    opt.rk_order = 1;
    const auto a = ssp_advance(s, m, e, CflPolicy{}, opt, nullptr, dt).averages();
    opt.rk_order = 2;
    const auto b = ssp_advance(s, m, e, CflPolicy{}, opt, nullptr, dt).averages();
    opt.rk_order = 3;
    const auto c = ssp_advance(s, m, e, CflPolicy{}, opt, nullptr, dt).averages();
    const double d12 = max_rel(a, b), d23 = max_rel(b, c);
    if (prev12 > 0.0) {
      CHECK(prev12 / d12 == doctest::Approx(4.0).epsilon(0.1));
      CHECK(prev23 / d23 == doctest::Approx(8.0).epsilon(0.15));
    }
    prev12 = d12;
    prev23 = d23;
  }
}

TEST_CASE("diagnostics and dumps") {
  const EosModel e = EosModel::ideal(5.0 / 3.0);
  const PolytopeMesh m = build_cartesian(4, 4, Bounds{}, BoundaryKind::Periodic);
  const auto u = cell_averages(m, e, [](Vec2) { return PrimitiveState{2.0, {}, {}, 0.5}; });
  const FieldSolution s = FieldSolution::from_averages(m, u);
  const Diagnostics d = diagnose(m, e, s, 0.0);
  CHECK(d.min_rho == doctest::Approx(2.0));
  CHECK(d.min_p == doctest::Approx(0.5));
  CHECK(d.mass_total == doctest::Approx(2.0));
  std::ostringstream os;
  write_dump(os, m, e, s);
  std::istringstream is(os.str());
  std::string line;
  int lines = 0;
  while (std::getline(is, line)) ++lines;
  CHECK(lines == 17);
}
