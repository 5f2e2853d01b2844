#include "pcp/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pcp/errors.hpp"

namespace pcp {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxIter = 200;

// p(rho, h) continued to h <= 1 by zero.  Tables stop at their lowest
// pressure; below it the pressure is interpolated linearly in h towards
// p = 0 at h = 1.
double pressure_continued(const EosModel &eos, double rho, double h) {
  if (!(h > 1.0)) return 0.0;
  if (eos.kind() == EosKind::Custom) {
    const double h_lo = eos.enthalpy(eos.p_min(), rho);
    if (h < h_lo) return eos.p_min() * (h - 1.0) / (h_lo - 1.0);
  }
  return eos.pressure(rho, h);
}

// xi^2 W^{-2} - D^2, which has the sign of f_4.
double f4_scaled(const ConservedState &U, double xi) {
  return xi * xi * inv_lorentz2_of_xi(U, xi) - U.D * U.D;
}

}  // namespace

double f_omega(const ConservedState &U, double xi) {
  const double b2 = norm2(U.B);
  const double mb = dot(U.m, U.B);
  const double a = xi * (xi + b2);
  return a * a - (xi * xi * norm2(U.m) + (2.0 * xi + b2) * mb * mb);
}

double inv_lorentz2_of_xi(const ConservedState &U, double xi) {
  const double b2 = norm2(U.B);
  const double mb = dot(U.m, U.B);
  const double s = xi + b2;
  const double r = norm(U.m) / s;
  const double t = mb / (xi * s);
  return 1.0 - r * r - (2.0 * xi + b2) * t * t;
}

double lorentz_of_xi(const ConservedState &U, double xi) {
  const double w = inv_lorentz2_of_xi(U, xi);
  if (!(w > 0.0) || !(xi > 0.0)) {
    std::ostringstream os;
    os << "xi=" << xi << " lies outside the domain where W(xi) is real";
    throw DomainError(os.str());
  }
  return 1.0 / std::sqrt(w);
}

double f_U(const EosModel &eos, const ConservedState &U, double xi) {
  const double iw2 = inv_lorentz2_of_xi(U, xi);
  if (!(iw2 > 0.0) || !(xi > 0.0)) {
    throw DomainError("f_U evaluated outside the domain where W(xi) is real");
  }
  const double iw = std::sqrt(iw2);
  const double b2 = norm2(U.B);
  const double mb = dot(U.m, U.B);
  const double rho = U.D * iw;
  const double h = xi * iw / U.D;
  const double p = pressure_continued(eos, rho, h);
  return (xi - U.E) + b2 - p - 0.5 * (b2 * iw2 + (mb / xi) * (mb / xi));
}

double find_xi4(const ConservedState &U) {
  if (!(U.D > 0.0)) throw InadmissibleError("D must be positive");
  double lo = std::max(U.D, 1e-12);
  if (f4_scaled(U, lo) > 0.0) {
    // Only reachable through the 1e-12 floor.
    double l = lo;
    int k = 0;
    while (f4_scaled(U, l) > 0.0) {
      if (++k > kMaxIter) throw ConvergenceError("no lower bracket for xi4");
      l *= 0.5;
    }
    lo = l;
  }
  double hi = lo;
  int doublings = 0;
  while (!(f4_scaled(U, hi) > 0.0)) {
    if (f4_scaled(U, hi) == 0.0) return hi;
    lo = hi;
    hi *= 2.0;
    if (++doublings > kMaxIter) throw ConvergenceError("no bracket for xi4 within 200 doublings");
  }
  while (hi - lo > 1e-14 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f = f4_scaled(U, mid);
    if (f > 0.0) hi = mid;
    else lo = mid;
  }
  return hi;
}

PrimitiveState recover_primitives(const EosModel &eos, const ConservedState &U, double tol,
                                  RecoveryWorkspace *ws, double bracket_start) {
  if (!(U.D > 0.0) || !std::isfinite(U.E) || !std::isfinite(norm2(U.m)) ||
      !std::isfinite(norm2(U.B))) {
    throw InadmissibleError("conserved state has D <= 0 or non-finite components");
  }
  RecoveryWorkspace local;
  RecoveryWorkspace &w = ws ? *ws : local;
  w = RecoveryWorkspace{};

  const double b2 = norm2(U.B);
  const double xi4 = find_xi4(U);
  w.xi4 = xi4;

  double lo = xi4;
  if (!(f_U(eos, U, lo) < 0.0)) {
    throw InadmissibleError("f_U(xi4) >= 0: no root on the physical branch");
  }
  double hi = bracket_start > 0.0 ? std::max(bracket_start, xi4 * (1.0 + 4.0 * kEps))
                                  : std::max(2.0 * xi4, U.E + b2 + U.D);
  int doublings = 0;
  for (;;) {
    const double f = f_U(eos, U, hi);
    if (f > 0.0) break;
    if (f == 0.0) {
      lo = hi;
      break;
    }
    lo = hi;
    hi *= 2.0;
    if (++doublings > kMaxIter) throw ConvergenceError("no upper bracket for f_U");
  }
  w.xi_hi = hi;

  double x = lo == hi ? hi : 0.5 * (lo + hi);
  double fx = f_U(eos, U, x);
  int it = 0;
  while (fx != 0.0) {
    if (++it > kMaxIter) throw ConvergenceError("recovery exceeded 200 iterations");
    if (fx < 0.0) lo = x;
    else hi = x;
    const double dx = 1e-7 * x;
    const double d = (f_U(eos, U, x + dx) - fx) / dx;
    double xn = x - fx / d;
    if (!(d > 0.0) || !(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    const bool done = std::abs(xn - x) <= 4.0 * kEps * x || hi - lo <= 4.0 * kEps * hi;
    x = xn;
    fx = f_U(eos, U, x);
    if (done) break;
  }
  w.iterations = it;
  w.xi_star = x;
  w.residual = std::abs(fx);
  if (!(w.residual <= tol * std::max(1.0, std::abs(U.E)))) {
    std::ostringstream os;
    os << "recovery residual " << w.residual << " above tolerance";
    throw ConvergenceError(os.str());
  }

  const double iw = std::sqrt(inv_lorentz2_of_xi(U, x));
  const double mb = dot(U.m, U.B);
  PrimitiveState V;
  V.v = (1.0 / (x + b2)) * (U.m + (mb / x) * U.B);
  V.B = U.B;
  V.rho = U.D * iw;
  const double h = x * iw / U.D;
  if (!(h > 1.0)) throw InadmissibleError("recovered enthalpy h <= 1");
  V.p = pressure_continued(eos, V.rho, h);
  if (!(V.rho > 0.0) || !(V.p > 0.0) || !(norm(V.v) < 1.0)) {
    throw InadmissibleError("recovered state violates rho > 0, p > 0 or |v| < 1");
  }
  return V;
}

}  // namespace pcp
