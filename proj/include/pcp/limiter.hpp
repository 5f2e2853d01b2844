#pragma once

#include <span>

#include "pcp/state.hpp"
#include "pcp/vec.hpp"

namespace pcp {

/// Linear (or constant) polynomial U(x) = mean + gx (x - c).x + gy (x - c).y.
struct CellPolynomial {
  ConservedState mean;
  ConservedState gx;
  ConservedState gy;
  Vec2 centroid;

  ConservedState at(Vec2 x) const;
};

inline constexpr double kDefaultEpsilon = 1e-13;

/// Psi(D, m, B, E - eps).
double psi_eps(const ConservedState &U, double eps);

/// D >= eps, q >= eps and Psi_eps >= 0.
bool in_g_eps(const ConservedState &U, double eps);

struct LimiterReport {
  double theta1 = 1.0;
  double theta2 = 1.0;
  double theta3 = 1.0;
};

/// Step (i): scale D about its mean so that D >= eps at every node.
CellPolynomial limit_density(const CellPolynomial &poly, std::span<const Vec2> nodes, double eps,
                             double *theta = nullptr);
/// Step (ii): scale D, m, E about their means so that q >= eps at every node.
CellPolynomial limit_q(const CellPolynomial &poly, std::span<const Vec2> nodes, double eps,
                       double *theta = nullptr);
/// Step (iii): scale every component so that Psi_eps >= 0 at every node.
CellPolynomial limit_psi(const CellPolynomial &poly, std::span<const Vec2> nodes, double eps,
                         double *theta = nullptr);

/// Steps (i)-(iii).  Throws AverageInadmissible or BracketError when the mean
/// itself is outside G_eps.
CellPolynomial pcp_limit(const CellPolynomial &poly, std::span<const Vec2> nodes,
                         double eps = kDefaultEpsilon, LimiterReport *report = nullptr);

}  // namespace pcp
