#pragma once

#include "pcp/eos.hpp"
#include "pcp/state.hpp"

namespace pcp {

/// <xi, F(U)> from already recovered primitives.
FluxVector directed_flux(const PrimitiveState &V, const ConservedState &U, const Vec3 &xi);

/// F_i(U) for axis in {0, 1, 2}; recovers the primitives first.
FluxVector physical_flux(const EosModel &eos, const ConservedState &U, int axis);

/// <xi, F(U)> = sum_l xi_l F_l(U).  Throws DomainError unless |xi| = 1 to 1e-12.
FluxVector directed_flux(const EosModel &eos, const ConservedState &U, const Vec3 &xi);

/// T3 for the 2D normal (cos phi, sin phi): rotation by -phi about z.
Mat3 rotation_2d(double phi);
/// T3 whose first row is (sin t cos p, sin t sin p, cos t).
Mat3 rotation_3d(double theta, double phi);
/// Orthogonal T3 with T3 xi = e1 for a unit vector xi.
Mat3 rotation_to_e1(const Vec3 &xi);

/// diag(1, T3^T, T3^T, 1) applied to F.
FluxVector unrotate(const FluxVector &F, const Mat3 &T3);

/// LxF flux (<xi, F(UL) + F(UR)> - alpha (UR - UL)) / 2.
FluxVector lxf_flux(const EosModel &eos, const ConservedState &UL, const ConservedState &UR,
                    const Vec3 &xi, double alpha = 1.0);
FluxVector lxf_flux(const PrimitiveState &VL, const ConservedState &UL, const PrimitiveState &VR,
                    const ConservedState &UR, const Vec3 &xi, double alpha = 1.0);

/// (U + theta F_i(U)).n* + p_m* + theta (v*_i p_m* - B_i (v*.B*)).
double splitting_inequality(const EosModel &eos, const ConservedState &U, double theta, int axis,
                            const StarDirection &s);
double splitting_inequality(const PrimitiveState &V, const ConservedState &U, double theta,
                            int axis, const StarDirection &s);

}  // namespace pcp
