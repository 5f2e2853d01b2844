#pragma once

#include <array>
#include <span>
#include <utility>

#include "pcp/eos.hpp"
#include "pcp/vec.hpp"

namespace pcp {

/// Conserved variables U = (D, m, B, E).
struct ConservedState {
  double D = 0.0;
  Vec3 m;
  Vec3 B;
  double E = 0.0;

  static constexpr int size = 8;

  /// Component access in the layout (D, m1, m2, m3, B1, B2, B3, E).
  double operator[](int i) const;
  double &operator[](int i);

  ConservedState &operator+=(const ConservedState &o);
  ConservedState &operator-=(const ConservedState &o);
  ConservedState &operator*=(double s);
  friend ConservedState operator+(ConservedState a, const ConservedState &b) { return a += b; }
  friend ConservedState operator-(ConservedState a, const ConservedState &b) { return a -= b; }
  friend ConservedState operator*(double s, ConservedState a) { return a *= s; }
  friend ConservedState operator*(ConservedState a, double s) { return a *= s; }
  friend bool operator==(const ConservedState &, const ConservedState &) = default;
};

using FluxVector = ConservedState;

/// Euclidean inner product in R^8.
double dot(const ConservedState &a, const ConservedState &b);

/// Max-norm scale |D| + |m| + |B|^2 + |E| used to normalize tolerances.
double scale_of(const ConservedState &U);

/// Primitive variables V = (rho, v, B, p).
struct PrimitiveState {
  double rho = 1.0;
  Vec3 v;
  Vec3 B;
  double p = 1.0;
};

/// W = 1/sqrt(1 - |v|^2); throws DomainError if |v| >= 1.
double lorentz_factor(const Vec3 &v);
/// 1 - |v|^2 evaluated as (1 - |v|)(1 + |v|).
double one_minus_v2(const Vec3 &v);
/// p_m = (|B|^2 / W^2 + (v.B)^2) / 2.
double magnetic_pressure(const PrimitiveState &V);

/// Direction (v*, B*) parametrizing the linear constraints of G1.
struct StarDirection {
  Vec3 vstar;
  Vec3 Bstar;
};

/// n* = (-sqrt(1-|v*|^2), -v*, -(1-|v*|^2) B* - (v*.B*) v*, 1).
ConservedState star_normal(const StarDirection &s);
/// p_m* = ((1-|v*|^2)|B*|^2 + (v*.B*)^2) / 2.
double star_magnetic_pressure(const StarDirection &s);

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 identity3();
Mat3 transpose(const Mat3 &T);
Mat3 operator*(const Mat3 &a, const Mat3 &b);
Vec3 operator*(const Mat3 &T, const Vec3 &x);

ConservedState prim_to_cons(const EosModel &eos, const PrimitiveState &V);

/// q(U) = E - sqrt(D^2 + |m|^2).
double q_value(const ConservedState &U);
/// Phi(U) = sqrt((|B|^2 - E)^2 + 3(E^2 - D^2 - |m|^2)); NaN when the radicand is negative.
double phi_value(const ConservedState &U);
/// Psi(U); -infinity when Phi is undefined or Phi + |B|^2 - E < 0.
double psi_value(const ConservedState &U);
/// (q_hat, q_tilde), the polynomial pair equivalent to Psi > 0 when D > 0, q > 0.
std::pair<double, double> qhat_qtilde(const ConservedState &U);

/// D > 0, q(U) > 0, Psi(U) > 0.
bool is_admissible_g0(const ConservedState &U);

/// U . n* + p_m*.  Throws DomainError if |v*| >= 1.
double g1_constraint(const ConservedState &U, const StarDirection &s);
/// min over B* of g1_constraint(U, {vstar, B*}); the minimizer is B* = B.
double g1_worst_bstar(const ConservedState &U, const Vec3 &vstar);

/// Weighted sum of states; weights nonnegative and summing to 1.
ConservedState convex_combine(std::span<const std::pair<double, ConservedState>> terms);

/// Applies T3 to m and B.  Throws MatrixError unless T3 is orthogonal to 1e-12.
ConservedState rotate_state(const ConservedState &U, const Mat3 &T3);

}  // namespace pcp
