#include "pcp/flux.hpp"

#include <algorithm>
#include <cmath>

#include "pcp/errors.hpp"
#include "pcp/recovery.hpp"

namespace pcp {

FluxVector directed_flux(const PrimitiveState &V, const ConservedState &U, const Vec3 &xi) {
  const double vn = dot(V.v, xi);
  const double Bn = dot(V.B, xi);
  const double vb = dot(V.v, V.B);
  const double iw2 = one_minus_v2(V.v);
  const double ptot = V.p + magnetic_pressure(V);
  FluxVector F;
  F.D = U.D * vn;
  F.m = vn * U.m - Bn * (iw2 * V.B + vb * V.v) + ptot * xi;
  F.B = vn * V.B - Bn * V.v;
  F.E = dot(U.m, xi);
  return F;
}

FluxVector physical_flux(const EosModel &eos, const ConservedState &U, int axis) {
  if (axis < 0 || axis > 2) throw DomainError("flux axis must be 0, 1 or 2");
  Vec3 e;
  e[axis] = 1.0;
  return directed_flux(recover_primitives(eos, U), U, e);
}

FluxVector directed_flux(const EosModel &eos, const ConservedState &U, const Vec3 &xi) {
  if (!(std::abs(norm(xi) - 1.0) <= 1e-12)) throw DomainError("flux direction is not a unit vector");
  return directed_flux(recover_primitives(eos, U), U, xi);
}

Mat3 rotation_2d(double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  return {{{c, s, 0.0}, {-s, c, 0.0}, {0.0, 0.0, 1.0}}};
}

Mat3 rotation_3d(double theta, double phi) {
  const double st = std::sin(theta);
  const double ct = std::cos(theta);
  const double sp = std::sin(phi);
  const double cp = std::cos(phi);
  return {{{st * cp, st * sp, ct}, {-sp, cp, 0.0}, {-ct * cp, -ct * sp, st}}};
}

Mat3 rotation_to_e1(const Vec3 &xi) {
  const double theta = std::acos(std::clamp(xi.z, -1.0, 1.0));
  const double phi = std::atan2(xi.y, xi.x);
  return rotation_3d(theta, phi);
}

FluxVector unrotate(const FluxVector &F, const Mat3 &T3) {
  const Mat3 Ti = transpose(T3);
  FluxVector r = F;
  r.m = Ti * F.m;
  r.B = Ti * F.B;
  return r;
}

FluxVector lxf_flux(const PrimitiveState &VL, const ConservedState &UL, const PrimitiveState &VR,
                    const ConservedState &UR, const Vec3 &xi, double alpha) {
  FluxVector F = directed_flux(VL, UL, xi) + directed_flux(VR, UR, xi);
  F -= alpha * (UR - UL);
  return 0.5 * F;
}

FluxVector lxf_flux(const EosModel &eos, const ConservedState &UL, const ConservedState &UR,
                    const Vec3 &xi, double alpha) {
  if (!(alpha >= 1.0)) throw DomainError("LxF requires alpha >= 1");
  if (!(std::abs(norm(xi) - 1.0) <= 1e-12)) throw DomainError("flux direction is not a unit vector");
  return lxf_flux(recover_primitives(eos, UL), UL, recover_primitives(eos, UR), UR, xi, alpha);
}

double splitting_inequality(const PrimitiveState &V, const ConservedState &U, double theta,
                            int axis, const StarDirection &s) {
  if (!(std::abs(theta) <= 1.0)) throw DomainError("theta must lie in [-1, 1]");
  if (axis < 0 || axis > 2) throw DomainError("flux axis must be 0, 1 or 2");
  Vec3 e;
  e[axis] = 1.0;
  const FluxVector F = directed_flux(V, U, e);
  const double pms = star_magnetic_pressure(s);
  return dot(U + theta * F, star_normal(s)) + pms +
         theta * (s.vstar[axis] * pms - U.B[axis] * dot(s.vstar, s.Bstar));
}

double splitting_inequality(const EosModel &eos, const ConservedState &U, double theta, int axis,
                            const StarDirection &s) {
  return splitting_inequality(recover_primitives(eos, U), U, theta, axis, s);
}

}  // namespace pcp
