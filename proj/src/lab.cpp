#include "pcp/lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "pcp/divergence.hpp"
#include "pcp/errors.hpp"
#include "pcp/flux.hpp"
#include "pcp/mesh.hpp"
#include "pcp/parallel.hpp"
#include "pcp/presets.hpp"
#include "pcp/quadrature.hpp"
#include "pcp/recovery.hpp"
#include "pcp/solver.hpp"

namespace pcp {
namespace {

Vec3 random_unit(std::mt19937_64 &rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    const Vec3 d{g(rng), g(rng), g(rng)};
    const double n = norm(d);
    if (n > 1e-8) return (1.0 / n) * d;
  }
}

// |v*| = 1 - 10^u with u uniform in [-12, 0].
double near_light_speed(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(-12.0, 0.0);
  return 1.0 - std::pow(10.0, u(rng));
}

PrimitiveState rotated(const PrimitiveState &V, const Mat3 &T3) {
  PrimitiveState r = V;
  r.v = T3 * V.v;
  r.B = T3 * V.B;
  return r;
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct FaceGeom {
  Vec3 normal;
  double length;
};

// Random convex polygon with vertices on the unit circle.
std::vector<FaceGeom> random_polygon(std::mt19937_64 &rng, int faces) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  for (;;) {
    std::vector<double> ang(static_cast<std::size_t>(faces));
    for (double &a : ang) a = u(rng);
    std::sort(ang.begin(), ang.end());
    bool ok = true;
    for (std::size_t i = 0; i < ang.size(); ++i) {
      const double gap = i + 1 < ang.size() ? ang[i + 1] - ang[i]
                                             : ang[0] + 2.0 * std::numbers::pi - ang[i];
      if (gap < 1e-3 || gap > std::numbers::pi - 1e-3) ok = false;
    }
    if (!ok) continue;
    std::vector<FaceGeom> f;
    for (std::size_t i = 0; i < ang.size(); ++i) {
      const Vec2 a{std::cos(ang[i]), std::sin(ang[i])};
      const double b_ang = ang[(i + 1) % ang.size()];
      const Vec2 b{std::cos(b_ang), std::sin(b_ang)};
      const Vec2 t = b - a;
      const double L = norm(t);
      f.push_back({Vec3{t.y / L, -t.x / L, 0.0}, L});
    }
    return f;
  }
}

std::vector<FaceGeom> random_tetrahedron(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    std::array<Vec3, 4> p;
    for (auto &x : p) x = {u(rng), u(rng), u(rng)};
    const double vol = std::abs(dot(p[1] - p[0], cross(p[2] - p[0], p[3] - p[0]))) / 6.0;
    if (vol < 1e-3) continue;
    const Vec3 c = 0.25 * (p[0] + p[1] + p[2] + p[3]);
    std::vector<FaceGeom> f;
    const int idx[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
    for (const auto &t : idx) {
      const Vec3 a = p[static_cast<std::size_t>(t[0])];
      const Vec3 b = p[static_cast<std::size_t>(t[1])];
      const Vec3 d = p[static_cast<std::size_t>(t[2])];
      Vec3 n = 0.5 * cross(b - a, d - a);
      const Vec3 fc = (1.0 / 3.0) * (a + b + d);
      if (dot(n, fc - c) < 0.0) n = -n;
      const double area = norm(n);
      f.push_back({(1.0 / area) * n, area});
    }
    return f;
  }
}

SplittingTrial splitting_trial(const SplittingConfig &cfg, const EosModel &eos, long id, int dim,
                               double &ddf_residual) {
  std::mt19937_64 rng(mix(cfg.seed, static_cast<std::uint64_t>(id) * 2 + (dim == 3 ? 1 : 0)));
  std::uniform_int_distribution<int> nf(3, 8);
  const std::vector<FaceGeom> faces = dim == 2 ? random_polygon(rng, nf(rng)) : random_tetrahedron(rng);
  const Rule1D w = gauss_rule(cfg.nodes);
  const StateRanges ranges{1e-3, 1e2, 1e-3, 1e2, 0.99, 5.0};

  std::vector<std::vector<PrimitiveState>> V(faces.size());
  double S = 0.0;
  double Ltot = 0.0;
  for (std::size_t j = 0; j < faces.size(); ++j) {
    for (int i = 0; i < cfg.nodes; ++i) {
      PrimitiveState s = random_primitive(rng, ranges);
      V[j].push_back(s);
      S += faces[j].length * w.weights[static_cast<std::size_t>(i)] * dot(faces[j].normal, s.B);
    }
    Ltot += faces[j].length;
  }
  const double c = S / Ltot;
  double resid = 0.0;
  double bscale = 0.0;
  for (std::size_t j = 0; j < faces.size(); ++j) {
    for (int i = 0; i < cfg.nodes; ++i) {
      PrimitiveState &s = V[j][static_cast<std::size_t>(i)];
      s.B -= c * faces[j].normal;
      resid += faces[j].length * w.weights[static_cast<std::size_t>(i)] * dot(faces[j].normal, s.B);
      bscale = std::max(bscale, norm(s.B) * Ltot);
    }
  }
  ddf_residual = std::abs(resid) / std::max(bscale, 1e-300);
  if (!(ddf_residual <= 1e-12)) throw ConstructionError("DDF projection failed");

  ConservedState ubar;
  for (std::size_t j = 0; j < faces.size(); ++j) {
    const Vec3 n = faces[j].normal;
    Mat3 T3 = identity3();
    if (dim == 3) T3 = rotation_3d(std::acos(std::clamp(n.z, -1.0, 1.0)), std::atan2(n.y, n.x));
    for (int i = 0; i < cfg.nodes; ++i) {
      const PrimitiveState &s = V[j][static_cast<std::size_t>(i)];
      const ConservedState U = prim_to_cons(eos, s);
      ConservedState term = U;
      if (!cfg.drop_flux) {
        FluxVector F;
        if (dim == 3) {
          F = unrotate(directed_flux(rotated(s, T3), rotate_state(U, T3), Vec3{1, 0, 0}), T3);
        } else {
          F = directed_flux(s, U, n);
        }
        term -= (1.0 / cfg.alpha) * F;
      }
      ubar += (faces[j].length * w.weights[static_cast<std::size_t>(i)]) * term;
    }
  }
  ubar *= 1.0 / Ltot;

  SplittingTrial t;
  t.id = id;
  t.dim = dim;
  t.faces = static_cast<int>(faces.size());
  t.D = ubar.D;
  t.min_slack = sampled_g1_min(ubar, cfg.star_samples, mix(cfg.seed ^ 0x5eed, static_cast<std::uint64_t>(id))) /
                scale_of(ubar);
  t.pass = ubar.D > 0.0 && t.min_slack >= -1e-12;
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------

double counterexample_limit(double theta) {
  const double t7 = std::pow(theta, 7);
  return 27.0 * t7 * (4.0 * theta + 1.0) * (4.0 * theta + 1.0) * (theta - 2.0) / 64.0;
}

CounterexampleReport run_counterexample(const CounterexampleConfig &cfg, const EosModel &eos) {
  if (!(cfg.theta > 0.0 && cfg.theta < 0.5)) throw ConfigError("theta must lie in (0, 1/2)");
  if (!(cfg.epsilon > 0.0) || !(cfg.tau > 0.0)) throw ConfigError("epsilon and tau must be positive");
  if (!(cfg.aspect > 0.0) || !(cfg.alpha >= 1.0)) throw ConfigError("invalid aspect or alpha");
  const double share = 1.0 / (2.0 * (1.0 + cfg.aspect));  // |E*| / sum |E|
  if (!(cfg.theta < share)) {
    throw ConfigError("theta too large for this aspect ratio: the step would violate the CFL bound");
  }

  // 3x3 cells of size aspect x 1, rotated so that the long sides have normal
  // (cos phi, sin phi).
  const double c = std::cos(cfg.phi);
  const double s = std::sin(cfg.phi);
  std::vector<Vec2> v;
  for (int j = 0; j <= 3; ++j) {
    for (int i = 0; i <= 3; ++i) {
      const double x = cfg.aspect * i;
      const double y = 1.0 * j;
      v.push_back({c * x - s * y, s * x + c * y});
    }
  }
  auto id = [](int i, int j) { return j * 4 + i; };
  std::vector<std::vector<int>> cells;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  }
  const PolytopeMesh mesh = build_polygon_mesh(v, cells, BoundaryKind::Outflow);
  constexpr std::size_t center = 4;
  constexpr int star = 5;

  const Mat3 T3 = rotation_2d(cfg.phi);
  const Mat3 Tinv = transpose(T3);
  const PrimitiveState Vhat{cfg.epsilon, {0.5, 0, 0}, {0, 0, 0}, cfg.tau};
  const PrimitiveState Vtil{cfg.epsilon, {0.5, 0, 0}, {1, 0, 0}, cfg.tau};
  const ConservedState Uhat = rotate_state(prim_to_cons(eos, Vhat), Tinv);
  const ConservedState Util = rotate_state(prim_to_cons(eos, Vtil), Tinv);
  std::vector<ConservedState> u(mesh.num_cells(), Uhat);
  u[static_cast<std::size_t>(star)] = Util;

  double estar = 0.0;
  for (const CellSide &side : mesh.sides[center]) {
    if (side.neighbor == star) estar = side.length;
  }
  const double dt = 2.0 * cfg.theta * mesh.measure[center] / (cfg.alpha * estar);
  const auto u1 = first_order_update(mesh, eos, u, dt, cfg.alpha);

  CounterexampleReport r;
  r.theta = cfg.theta;
  r.epsilon = cfg.epsilon;
  r.tau = cfg.tau;
  r.cfl = cfl_number(mesh, center, cfg.alpha, dt);
  r.rotated = rotate_state(u1[center], T3);
  const auto [qh, qt] = qhat_qtilde(r.rotated);
  r.qhat = qh;
  r.qtilde = qt;
  r.analytic_limit = counterexample_limit(cfg.theta);
  r.admissible = is_admissible_g0(u1[center]);
  return r;
}

// ---------------------------------------------------------------------------

double sampled_g1_min(const ConservedState &U, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double best = std::numeric_limits<double>::infinity();
  auto probe = [&](const Vec3 &dir, double speed) {
    best = std::min(best, g1_worst_bstar(U, speed * dir));
  };
  std::vector<Vec3> dirs;
  auto add = [&](const Vec3 &d) {
    const double n = norm(d);
    if (n > 0.0 && std::isfinite(n)) {
      dirs.push_back((1.0 / n) * d);
      dirs.push_back((-1.0 / n) * d);
    }
  };
  add(U.m);
  add(U.B);
  add(cross(U.m, U.B));
  for (const Vec3 &d : dirs) {
    for (double sp : {0.0, 0.5, 0.9, 0.99, 0.999, 1.0 - 1e-6, 1.0 - 1e-10, 1.0 - 1e-12}) probe(d, sp);
  }
  for (int i = 0; i < samples; ++i) probe(random_unit(rng), near_light_speed(rng));
  return best;
}

SplittingReport check_generalized_splitting(const SplittingConfig &cfg, const EosModel &eos) {
  if (!(cfg.alpha >= 1.0)) throw ConfigError("alpha must be >= 1");
  SplittingReport r;
  const long total = cfg.trials_2d + cfg.trials_3d;
  r.rows.resize(static_cast<std::size_t>(total));
  std::vector<double> resid(static_cast<std::size_t>(total), 0.0);
  parallel_for(static_cast<std::size_t>(total), cfg.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const long id = static_cast<long>(k);
      const int dim = id < cfg.trials_2d ? 2 : 3;
      r.rows[k] = splitting_trial(cfg, eos, id, dim, resid[k]);
    }
  });
  r.trials = total;
  r.worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    if (!r.rows[k].pass) ++r.failures;
    r.worst_slack = std::min(r.worst_slack, r.rows[k].min_slack);
    r.max_ddf_residual = std::max(r.max_ddf_residual, resid[k]);
  }
  return r;
}

// ---------------------------------------------------------------------------

DivergenceReport check_divergence_growth(const DivergenceConfig &cfg, const EosModel &eos) {
  const PolytopeMesh mesh = build_cartesian(cfg.n, cfg.n, Bounds{}, BoundaryKind::Periodic);
  std::mt19937_64 rng(cfg.seed);
  std::vector<ConservedState> u;
  if (cfg.ddf) {
    u = random_admissible_ddf(mesh, eos, rng, StateRanges{});
  } else {
    // Without DDF data the scheme is not positivity preserving, so keep the
    // states well inside the admissible set.
    const StateRanges ranges{0.5, 2.0, 0.5, 2.0, 0.5, 1.0};
    for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
      u.push_back(prim_to_cons(eos, random_primitive(rng, ranges)));
    }
  }
  const double dt = compute_dt(mesh, CflPolicy{cfg.sigma, cfg.alpha}, SchemeMode::FirstOrder);
  auto max_div = [&](const std::vector<ConservedState> &x) {
    std::vector<Vec3> B(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) B[k] = x[k].B;
    double m = 0.0;
    for (const auto &row : discrete_divergence(mesh, B)) m = std::max(m, std::abs(row.div));
    return m;
  };
  DivergenceReport r;
  double bscale = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) bscale = std::max(bscale, norm(u[k].B) * mesh.perimeter(k));
  r.tolerance = 1e-12 * std::max(bscale, 1e-300);
  r.max_abs_div.push_back(max_div(u));
  for (int n = 0; n < cfg.steps; ++n) {
    u = first_order_update(mesh, eos, u, dt, cfg.alpha, cfg.threads);
    r.max_abs_div.push_back(max_div(u));
  }
  for (std::size_t n = 1; n < r.max_abs_div.size(); ++n) {
    if (r.max_abs_div[n] > r.max_abs_div[n - 1] + r.tolerance) r.non_increasing = false;
  }
  for (double d : r.max_abs_div) {
    if (d > 1e-11) r.ddf_preserved = false;
  }
  return r;
}

// ---------------------------------------------------------------------------

OdeltaReport check_odelta_bound(const OdeltaConfig &cfg, const EosModel &eos, bool ddf_exact) {
  OdeltaReport rep;
  const CflPolicy cfl{cfg.sigma, cfg.alpha};
  for (int f = 0; f < cfg.fields; ++f) {
    PresetParams params{{"amplitude", 0.3 + 0.1 * f}, {"b0", ddf_exact ? 0.0 : 0.4 + 0.3 * f},
                        {"bx", 0.2 * f}, {"by", 0.1}, {"p", 0.5 + 0.5 * f}};
    const auto field = preset_initial_condition("smooth-vortex-like", params);
    double prev = 0.0;
    for (int level = 0; level < cfg.levels; ++level) {
      const int n = cfg.n0 << level;
      const PolytopeMesh mesh = build_cartesian(n, n, Bounds{}, BoundaryKind::Periodic);
      const SchemeGeometry geo = build_scheme_geometry(mesh, 1, 3);
      const auto u = cell_averages(mesh, eos, field);
      FieldSolution p = reconstruct_p1(mesh, u, true, true);
      p = limit_solution(p, geo, kDefaultEpsilon);
      const double dt = compute_dt(mesh, cfl, SchemeMode::HighOrder, &geo);
      const auto div = discrete_divergence(mesh, geo.quad.gauss, [&](std::size_t k, Vec2 x) {
        return p.eval(k, x).B;
      });

      OdeltaLevel L;
      L.field = f;
      L.n = n;
      L.delta = mesh.max_radius;
      L.min_slack = std::numeric_limits<double>::infinity();
      L.min_margin = std::numeric_limits<double>::infinity();
      std::mt19937_64 rng(mix(cfg.seed, static_cast<std::uint64_t>(f * 100 + level)));
      std::normal_distribution<double> g(0.0, 1.0);
      for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
        const double P = mesh.perimeter(k);
        const DecompositionTerms t = decomposition_terms(mesh, eos, p, k, geo, dt, cfg.alpha);
        L.max_div_out = std::max(L.max_div_out, std::abs(div[k].div_out) / P);
        L.bound = std::max(L.bound, 2.0 * t.lambda * norm(u[k].B) * std::abs(div[k].div_out) /
                                        (cfg.alpha * P));
        const double sc = scale_of(t.Xi2);
        for (int s = 0; s < cfg.star_samples; ++s) {
          StarDirection sd;
          sd.vstar = near_light_speed(rng) * random_unit(rng);
          sd.Bstar = t.Xi2.B + Vec3{0.1 * g(rng), 0.1 * g(rng), 0.1 * g(rng)};
          const double slack = g1_constraint(t.Xi2, sd);
          const double bound =
              -dot(sd.vstar, sd.Bstar) * (div[k].div_in + div[k].div_out) / (2.0 * cfg.alpha * P);
          L.min_slack = std::min(L.min_slack, slack);
          L.min_margin = std::min(L.min_margin, (slack - bound) / sc);
        }
      }
      if (L.min_margin < -1e-12) rep.inequality_holds = false;
      L.dividend_zero = L.bound == 0.0;
      if (level > 0 && L.bound > 0.0) rep.ratios.push_back(prev / L.bound);
      prev = L.bound;
      rep.levels.push_back(L);
    }
  }
  if (!rep.ratios.empty()) {
    std::vector<double> r = rep.ratios;
    std::sort(r.begin(), r.end());
    const std::size_t m = r.size() / 2;
    rep.median_ratio = r.size() % 2 ? r[m] : 0.5 * (r[m - 1] + r[m]);
  }
  return rep;
}

// ---------------------------------------------------------------------------

void write_counterexample_csv(std::ostream &out, const std::vector<CounterexampleReport> &rows) {
  out << "theta,epsilon,tau,cfl,qtilde,qhat,analytic_limit,admissible\n";
  char buf[512];
  for (const auto &r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.theta,
                  r.epsilon, r.tau, r.cfl, r.qtilde, r.qhat, r.analytic_limit, r.admissible ? 1 : 0);
    out << buf;
  }
}

void write_splitting_csv(std::ostream &out, const SplittingReport &r) {
  out << "trial,dim,faces,D,min_slack,pass\n";
  char buf[256];
  for (const auto &t : r.rows) {
    std::snprintf(buf, sizeof buf, "%ld,%d,%d,%.17g,%.17g,%d\n", t.id, t.dim, t.faces, t.D,
                  t.min_slack, t.pass ? 1 : 0);
    out << buf;
  }
}

void write_divergence_series_csv(std::ostream &out, const DivergenceReport &r) {
  out << "n,max_abs_div\n";
  char buf[128];
  for (std::size_t n = 0; n < r.max_abs_div.size(); ++n) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", n, r.max_abs_div[n]);
    out << buf;
  }
}

void write_odelta_csv(std::ostream &out, const OdeltaReport &r) {
  out << "field,n,delta,max_div_out,bound,min_slack,min_margin\n";
  char buf[512];
  for (const auto &l : r.levels) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", l.field, l.n, l.delta,
                  l.max_div_out, l.bound, l.min_slack, l.min_margin);
    out << buf;
  }
}

}  // namespace pcp
