#include "pcp/limiter.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pcp/errors.hpp"

namespace pcp {
namespace {

constexpr double kShrink = 1.0 - 1e-12;
constexpr int kMaxShrink = 64;

// Scales the gradient of the selected components by theta.
CellPolynomial scaled(const CellPolynomial &p, double theta, bool d, bool m, bool b, bool e) {
  CellPolynomial r = p;
  auto apply = [&](ConservedState &g) {
    if (d) g.D *= theta;
    if (m) g.m *= theta;
    if (b) g.B *= theta;
    if (e) g.E *= theta;
  };
  apply(r.gx);
  apply(r.gy);
  return r;
}

// Shrinks theta until pred holds at every node of the scaled polynomial.
template <class Pred>
CellPolynomial settle(const CellPolynomial &p, std::span<const Vec2> nodes, double &theta,
                      bool d, bool m, bool b, bool e, Pred &&pred) {
  for (int k = 0;; ++k) {
    CellPolynomial r = scaled(p, theta, d, m, b, e);
    bool ok = true;
    for (const Vec2 &x : nodes) {
      if (!pred(r.at(x))) {
        ok = false;
        break;
      }
    }
    if (ok || theta == 0.0) return r;
    if (k >= kMaxShrink) theta = 0.0;
    else theta *= std::max(0.5, 1.0 - std::ldexp(1.0 - kShrink, k));
  }
}

}  // namespace

ConservedState CellPolynomial::at(Vec2 x) const {
  const Vec2 d = x - centroid;
  ConservedState u = mean;
  if (d.x != 0.0) u += d.x * gx;
  if (d.y != 0.0) u += d.y * gy;
  return u;
}

double psi_eps(const ConservedState &U, double eps) {
  ConservedState u = U;
  u.E -= eps;
  return psi_value(u);
}

bool in_g_eps(const ConservedState &U, double eps) {
  return U.D >= eps && q_value(U) >= eps && psi_eps(U, eps) >= 0.0;
}

CellPolynomial limit_density(const CellPolynomial &poly, std::span<const Vec2> nodes, double eps,
                             double *theta) {
  const double Dbar = poly.mean.D;
  if (!(Dbar >= eps)) {
    std::ostringstream os;
    os << "cell average density " << Dbar << " below eps";
    throw AverageInadmissible(os.str());
  }
  double dmin = Dbar;
  for (const Vec2 &x : nodes) dmin = std::min(dmin, poly.at(x).D);
  double t = 1.0;
  if (dmin < eps) t = std::clamp((Dbar - eps) / (Dbar - dmin), 0.0, 1.0);
  CellPolynomial r = settle(poly, nodes, t, true, false, false, false,
                            [eps](const ConservedState &u) { return u.D >= eps; });
  if (theta) *theta = t;
  return r;
}

CellPolynomial limit_q(const CellPolynomial &poly, std::span<const Vec2> nodes, double eps,
                       double *theta) {
  const double qbar = q_value(poly.mean);
  if (!(qbar >= eps)) {
    std::ostringstream os;
    os << "cell average q " << qbar << " below eps";
    throw AverageInadmissible(os.str());
  }
  double qmin = qbar;
  for (const Vec2 &x : nodes) qmin = std::min(qmin, q_value(poly.at(x)));
  double t = 1.0;
  if (qmin < eps) t = std::clamp((qbar - eps) / (qbar - qmin), 0.0, 1.0);
  CellPolynomial r = settle(poly, nodes, t, true, true, false, true,
                            [eps](const ConservedState &u) { return q_value(u) >= eps; });
  if (theta) *theta = t;
  return r;
}

CellPolynomial limit_psi(const CellPolynomial &poly, std::span<const Vec2> nodes, double eps,
                         double *theta) {
  const ConservedState &ubar = poly.mean;
  if (!(ubar.D >= eps) || !(q_value(ubar) >= eps)) {
    throw AverageInadmissible("cell average outside G_eps");
  }
  if (!(psi_eps(ubar, eps) >= 0.0)) {
    throw BracketError("Psi_eps of the cell average is negative");
  }
  double t = 1.0;
  for (const Vec2 &x : nodes) {
    const ConservedState u = poly.at(x);
    if (psi_eps(u, eps) >= 0.0) continue;
    const ConservedState du = u - ubar;
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 100 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (psi_eps(ubar + mid * du, eps) >= 0.0) lo = mid;
      else hi = mid;
    }
    t = std::min(t, lo);
  }
  CellPolynomial r =
      settle(poly, nodes, t, true, true, true, true, [eps](const ConservedState &u) {
        return u.D >= eps && q_value(u) >= eps && psi_eps(u, eps) >= 0.0;
      });
  if (theta) *theta = t;
  return r;
}

CellPolynomial pcp_limit(const CellPolynomial &poly, std::span<const Vec2> nodes, double eps,
                         LimiterReport *report) {
  LimiterReport rep;
  CellPolynomial p = limit_density(poly, nodes, eps, &rep.theta1);
  p = limit_q(p, nodes, eps, &rep.theta2);
  p = limit_psi(p, nodes, eps, &rep.theta3);
  if (report) *report = rep;
  return p;
}

}  // namespace pcp
