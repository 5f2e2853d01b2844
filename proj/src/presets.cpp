#include "pcp/presets.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "pcp/divergence.hpp"
#include "pcp/errors.hpp"
#include "pcp/solver.hpp"

namespace pcp {
namespace {

double get(const PresetParams &p, const std::string &key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

PrimitiveState state_from(const PresetParams &p, const std::string &suffix, const PrimitiveState &d) {
  PrimitiveState s;
  s.rho = get(p, "rho" + suffix, d.rho);
  s.p = get(p, "p" + suffix, d.p);
  s.v = {get(p, "vx" + suffix, d.v.x), get(p, "vy" + suffix, d.v.y), get(p, "vz" + suffix, d.v.z)};
  s.B = {get(p, "bx" + suffix, d.B.x), get(p, "by" + suffix, d.B.y), get(p, "bz" + suffix, d.B.z)};
  if (!(s.rho > 0.0) || !(s.p > 0.0) || !(norm(s.v) < 1.0)) {
    throw ConfigError("preset state must have rho > 0, p > 0 and |v| < 1");
  }
  return s;
}

// Applies D (first-order centered divergence) to in-plane components.
std::vector<double> apply_div(const PolytopeMesh &mesh, const std::vector<Vec3> &B) {
  std::vector<double> d(mesh.num_cells(), 0.0);
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    for (const CellSide &s : mesh.sides[k]) {
      const std::size_t t = s.neighbor >= 0 ? static_cast<std::size_t>(s.neighbor) : k;
      const Vec3 n = lift(s.normal);
      d[k] += 0.5 * s.length * (dot(n, B[k]) + dot(n, B[t]));
    }
  }
  return d;
}

std::vector<Vec3> apply_div_t(const PolytopeMesh &mesh, const std::vector<double> &lam) {
  std::vector<Vec3> r(mesh.num_cells());
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    for (const CellSide &s : mesh.sides[k]) {
      const std::size_t t = s.neighbor >= 0 ? static_cast<std::size_t>(s.neighbor) : k;
      const Vec3 n = (0.5 * s.length * lam[k]) * lift(s.normal);
      r[k] += n;
      r[t] += n;
    }
  }
  return r;
}

double dotv(const std::vector<double> &a, const std::vector<double> &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

const std::vector<std::string> &preset_names() {
  static const std::vector<std::string> names{"constant", "smooth-vortex-like",
                                              "random-admissible-ddf", "discontinuity"};
  return names;
}

std::function<PrimitiveState(Vec2)> preset_initial_condition(const std::string &name,
                                                             const PresetParams &params) {
  if (name == "constant") {
    const PrimitiveState s = state_from(params, "", PrimitiveState{1.0, {}, {}, 1.0});
    return [s](Vec2) { return s; };
  }
  if (name == "smooth-vortex-like") {
    const double rho0 = get(params, "rho", 1.0);
    const double p0 = get(params, "p", 1.0);
    const double amp = get(params, "amplitude", 0.5);
    const double b0 = get(params, "b0", 0.5);
    const double bx = get(params, "bx", 0.0);
    const double by = get(params, "by", 0.0);
    if (!(rho0 > 0.2) || !(p0 > 0.0) || !(std::abs(amp) < 0.7)) {
      throw ConfigError("smooth-vortex-like needs rho > 0.2, p > 0, |amplitude| < 0.7");
    }
    return [=](Vec2 x) {
      constexpr double tau = 2.0 * std::numbers::pi;
      const double sx = std::sin(tau * x.x);
      const double sy = std::sin(tau * x.y);
      const double cx = std::cos(tau * x.x);
      const double cy = std::cos(tau * x.y);
      PrimitiveState s;
      s.rho = rho0 + 0.2 * sx * sy;
      s.p = p0;
      s.v = {-amp * sy, amp * sx, 0.0};
      s.B = {bx + b0 * sx * cy, by - b0 * cx * sy, 0.0};
      return s;
    };
  }
  if (name == "discontinuity") {
    const PrimitiveState l = state_from(params, "", PrimitiveState{1.0, {}, {0.5, 1.0, 0.0}, 1.0});
    const PrimitiveState r =
        state_from(params, "_r", PrimitiveState{0.125, {}, {0.5, -1.0, 0.0}, 0.1});
    const double x0 = get(params, "split_x", 0.5);
    return [=](Vec2 x) { return x.x < x0 ? l : r; };
  }
  if (name == "random-admissible-ddf") {
    throw ConfigError("random-admissible-ddf is defined per cell, not pointwise");
  }
  throw UnknownPreset("unknown initial condition preset '" + name + "'");
}

std::vector<ConservedState> initial_averages(const std::string &name, const PresetParams &params,
                                             const PolytopeMesh &mesh, const EosModel &eos,
                                             std::uint64_t seed) {
  if (name == "random-admissible-ddf") {
    std::mt19937_64 rng(seed);
    StateRanges r;
    r.rho_min = get(params, "rho_min", r.rho_min);
    r.rho_max = get(params, "rho_max", r.rho_max);
    r.p_min = get(params, "p_min", r.p_min);
    r.p_max = get(params, "p_max", r.p_max);
    r.v_max = get(params, "v_max", r.v_max);
    r.B_max = get(params, "b_max", r.B_max);
    return random_admissible_ddf(mesh, eos, rng, r);
  }
  return cell_averages(mesh, eos, preset_initial_condition(name, params));
}

PrimitiveState random_primitive(std::mt19937_64 &rng, const StateRanges &r) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  auto logu = [&](double a, double b) { return std::exp(std::log(a) + u(rng) * std::log(b / a)); };
  PrimitiveState s;
  s.rho = logu(r.rho_min, r.rho_max);
  s.p = logu(r.p_min, r.p_max);
  Vec3 dir{g(rng), g(rng), g(rng)};
  const double n = norm(dir);
  s.v = n > 0.0 ? (u(rng) * r.v_max / n) * dir : Vec3{};
  s.B = {r.B_max * (2.0 * u(rng) - 1.0), r.B_max * (2.0 * u(rng) - 1.0),
         r.B_max * (2.0 * u(rng) - 1.0)};
  return s;
}

void project_ddf(const PolytopeMesh &mesh, std::vector<Vec3> &B, double tol) {
  // Conjugate gradients on D D^T lambda = D B; the system is consistent, so
  // CG converges to a solution even though D D^T may be singular.
  const std::size_t n = mesh.num_cells();
  std::vector<double> rhs = apply_div(mesh, B);
  double bscale = 0.0;
  for (const Vec3 &b : B) bscale = std::max(bscale, norm(b));
  double lscale = 0.0;
  for (std::size_t k = 0; k < n; ++k) lscale = std::max(lscale, mesh.perimeter(k));
  const double target = tol * std::max(bscale, 1e-300) * lscale;

  std::vector<double> lam(n, 0.0), r = rhs, p = rhs;
  double rr = dotv(r, r);
  for (std::size_t it = 0; it < 20 * n + 100 && std::sqrt(rr) > 1e-3 * target; ++it) {
    const std::vector<double> Ap = apply_div(mesh, apply_div_t(mesh, p));
    const double pAp = dotv(p, Ap);
    if (!(pAp > 0.0)) break;
    const double a = rr / pAp;
    for (std::size_t i = 0; i < n; ++i) {
      lam[i] += a * p[i];
      r[i] -= a * Ap[i];
    }
    const double rr2 = dotv(r, r);
    const double beta = rr2 / rr;
    rr = rr2;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  const std::vector<Vec3> corr = apply_div_t(mesh, lam);
  for (std::size_t k = 0; k < n; ++k) {
    B[k].x -= corr[k].x;
    B[k].y -= corr[k].y;
  }
  double worst = 0.0;
  for (double d : apply_div(mesh, B)) worst = std::max(worst, std::abs(d));
  if (!(worst <= target)) {
    std::ostringstream os;
    os << "divergence projection left max |div| = " << worst;
    throw ConstructionError(os.str());
  }
}

std::vector<ConservedState> random_admissible_ddf(const PolytopeMesh &mesh, const EosModel &eos,
                                                  std::mt19937_64 &rng, const StateRanges &r) {
  std::vector<PrimitiveState> V(mesh.num_cells());
  std::vector<Vec3> B(mesh.num_cells());
  for (std::size_t k = 0; k < V.size(); ++k) {
    V[k] = random_primitive(rng, r);
    B[k] = V[k].B;
  }
  project_ddf(mesh, B);
  std::vector<ConservedState> u(V.size());
  for (std::size_t k = 0; k < V.size(); ++k) {
    V[k].B = B[k];
    u[k] = prim_to_cons(eos, V[k]);
  }
  return u;
}

}  // namespace pcp
