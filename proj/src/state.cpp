#include "pcp/state.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pcp/errors.hpp"

namespace pcp {

double ConservedState::operator[](int i) const {
  switch (i) {
    case 0:
      return D;
    case 1:
    case 2:
    case 3:
      return m[i - 1];
    case 4:
    case 5:
    case 6:
      return B[i - 4];
    default:
      return E;
  }
}

double &ConservedState::operator[](int i) {
  switch (i) {
    case 0:
      return D;
    case 1:
    case 2:
    case 3:
      return m[i - 1];
    case 4:
    case 5:
    case 6:
      return B[i - 4];
    default:
      return E;
  }
}

ConservedState &ConservedState::operator+=(const ConservedState &o) {
  D += o.D;
  m += o.m;
  B += o.B;
  E += o.E;
  return *this;
}

ConservedState &ConservedState::operator-=(const ConservedState &o) {
  D -= o.D;
  m -= o.m;
  B -= o.B;
  E -= o.E;
  return *this;
}

ConservedState &ConservedState::operator*=(double s) {
  D *= s;
  m *= s;
  B *= s;
  E *= s;
  return *this;
}

double dot(const ConservedState &a, const ConservedState &b) {
  return a.D * b.D + dot(a.m, b.m) + dot(a.B, b.B) + a.E * b.E;
}

double scale_of(const ConservedState &U) {
  return std::abs(U.D) + norm(U.m) + norm2(U.B) + std::abs(U.E);
}

double one_minus_v2(const Vec3 &v) {
  const double s = norm(v);
  return (1.0 - s) * (1.0 + s);
}

double lorentz_factor(const Vec3 &v) {
  const double w = one_minus_v2(v);
  if (!(w > 0.0)) throw DomainError("superluminal velocity");
  return 1.0 / std::sqrt(w);
}

double magnetic_pressure(const PrimitiveState &V) {
  const double vb = dot(V.v, V.B);
  return 0.5 * (one_minus_v2(V.v) * norm2(V.B) + vb * vb);
}

ConservedState star_normal(const StarDirection &s) {
  const double w = one_minus_v2(s.vstar);
  if (!(w > 0.0)) throw DomainError("star direction requires |v*| < 1");
  const double vb = dot(s.vstar, s.Bstar);
  ConservedState n;
  n.D = -std::sqrt(w);
  n.m = -s.vstar;
  n.B = -(w * s.Bstar + vb * s.vstar);
  n.E = 1.0;
  return n;
}

double star_magnetic_pressure(const StarDirection &s) {
  const double vb = dot(s.vstar, s.Bstar);
  return 0.5 * (one_minus_v2(s.vstar) * norm2(s.Bstar) + vb * vb);
}

Mat3 identity3() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

Mat3 transpose(const Mat3 &T) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = T[j][i];
  return r;
}

Mat3 operator*(const Mat3 &a, const Mat3 &b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

Vec3 operator*(const Mat3 &T, const Vec3 &x) {
  return {T[0][0] * x.x + T[0][1] * x.y + T[0][2] * x.z,
          T[1][0] * x.x + T[1][1] * x.y + T[1][2] * x.z,
          T[2][0] * x.x + T[2][1] * x.y + T[2][2] * x.z};
}

ConservedState prim_to_cons(const EosModel &eos, const PrimitiveState &V) {
  const double W = lorentz_factor(V.v);
  const double h = eos.enthalpy(V.p, V.rho);
  const double b2 = norm2(V.B);
  const double vb = dot(V.v, V.B);
  const double rhohW2 = V.rho * h * W * W;
  ConservedState U;
  U.D = V.rho * W;
  U.m = (rhohW2 + b2) * V.v - vb * V.B;
  U.B = V.B;
  U.E = rhohW2 - V.p - magnetic_pressure(V) + b2;
  return U;
}

double q_value(const ConservedState &U) { return U.E - std::hypot(U.D, norm(U.m)); }

namespace {

// a = E - |B|^2 and s = E^2 - D^2 - |m|^2; Phi = sqrt(a^2 + 3 s).
struct PhiParts {
  double a;
  double s;
  double phi;
};

PhiParts phi_parts(const ConservedState &U) {
  PhiParts r;
  r.a = U.E - norm2(U.B);
  r.s = (U.E - U.D) * (U.E + U.D) - norm2(U.m);
  const double rad = r.a * r.a + 3.0 * r.s;
  r.phi = rad >= 0.0 ? std::sqrt(rad) : std::numeric_limits<double>::quiet_NaN();
  return r;
}

// Phi - a and Phi + 2a, rearranged to avoid cancellation in the relevant sign
// of a.
double phi_minus_a(const PhiParts &r) {
  return r.a > 0.0 ? 3.0 * r.s / (r.phi + r.a) : r.phi - r.a;
}

double phi_plus_2a(const PhiParts &r) {
  return r.a < 0.0 ? 3.0 * (r.s - r.a * r.a) / (r.phi - 2.0 * r.a) : r.phi + 2.0 * r.a;
}

double k_term(const ConservedState &U) {
  const double mb = dot(U.m, U.B);
  return U.D * U.D * norm2(U.B) + mb * mb;
}

}  // namespace

double phi_value(const ConservedState &U) { return phi_parts(U).phi; }

double psi_value(const ConservedState &U) {
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  const PhiParts r = phi_parts(U);
  if (std::isnan(r.phi)) return ninf;
  const double root_arg = phi_minus_a(r);
  if (!(root_arg >= 0.0)) return ninf;
  return phi_plus_2a(r) * std::sqrt(root_arg) - std::sqrt(13.5 * k_term(U));
}

std::pair<double, double> qhat_qtilde(const ConservedState &U) {
  const PhiParts r = phi_parts(U);
  if (std::isnan(r.phi)) {
    const double inf = std::numeric_limits<double>::infinity();
    return {-inf, -inf};
  }
  const double qhat = phi_plus_2a(r);
  // q_tilde = Phi^6 - X^2 with X = a^3 + 27K/2 - 9sa, evaluated as
  // (Phi^3 - X)(Phi^3 + X) where
  //   Phi^3 - X = (Phi + 2a)^2 (Phi - a) - 27K/2,
  //   Phi^3 + X = (Phi - 2a)^2 (Phi + a) + 27K/2.
  const double k = 13.5 * k_term(U);
  const double pm = phi_minus_a(r);
  const double pm2 = r.a > 0.0 ? 3.0 * (r.s - r.a * r.a) / (r.phi + 2.0 * r.a) : r.phi - 2.0 * r.a;
  const double pp = r.a < 0.0 ? 3.0 * r.s / (r.phi - r.a) : r.phi + r.a;
  const double P = qhat * std::sqrt(std::max(pm, 0.0));
  const double R = std::sqrt(k);
  const double lower = pm < 0.0 ? qhat * qhat * pm - k : (P - R) * (P + R);
  const double upper = pm2 * pm2 * pp + k;
  return {qhat, lower * upper};
}

bool is_admissible_g0(const ConservedState &U) {
  return U.D > 0.0 && q_value(U) > 0.0 && psi_value(U) > 0.0;
}

double g1_constraint(const ConservedState &U, const StarDirection &s) {
  return dot(U, star_normal(s)) + star_magnetic_pressure(s);
}

double g1_worst_bstar(const ConservedState &U, const Vec3 &vstar) {
  const double w = one_minus_v2(vstar);
  if (!(w > 0.0)) throw DomainError("star direction requires |v*| < 1");
  const double vb = dot(vstar, U.B);
  return U.E - U.D * std::sqrt(w) - dot(vstar, U.m) - 0.5 * (w * norm2(U.B) + vb * vb);
}

ConservedState convex_combine(std::span<const std::pair<double, ConservedState>> terms) {
  if (terms.empty()) throw WeightError("convex combination of no states");
  double sum = 0.0;
  ConservedState out;
  for (const auto &[w, U] : terms) {
    if (!(w >= 0.0)) throw WeightError("negative convex weight");
    sum += w;
    out += w * U;
  }
  const double tol = std::max(1e-14, 4.0 * std::numeric_limits<double>::epsilon() *
                                         static_cast<double>(terms.size()));
  if (!(std::abs(sum - 1.0) <= tol)) {
    std::ostringstream os;
    os << "convex weights sum to " << sum;
    throw WeightError(os.str());
  }
  return out;
}

ConservedState rotate_state(const ConservedState &U, const Mat3 &T3) {
  const Mat3 g = transpose(T3) * T3;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (!(std::abs(g[i][j] - (i == j ? 1.0 : 0.0)) <= 1e-12)) {
        throw MatrixError("rotation matrix is not orthogonal");
      }
    }
  }
  ConservedState r = U;
  r.m = T3 * U.m;
  r.B = T3 * U.B;
  return r;
}

}  // namespace pcp
