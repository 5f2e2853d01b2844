#pragma once

#include "pcp/eos.hpp"
#include "pcp/state.hpp"

namespace pcp {

/// Per-call record of a primitive recovery.
struct RecoveryWorkspace {
  double xi4 = 0.0;
  double xi_star = 0.0;
  double xi_hi = 0.0;  ///< upper end of the initial bracket
  int iterations = 0;
  double residual = 0.0;
};

/// f_Omega(xi) = xi^2 (xi + |B|^2)^2 - [xi^2 |m|^2 + (2 xi + |B|^2)(m.B)^2].
double f_omega(const ConservedState &U, double xi);

/// W^{-2}(xi) = f_Omega / (xi^2 (xi + |B|^2)^2), evaluated without forming the quartic.
double inv_lorentz2_of_xi(const ConservedState &U, double xi);

/// W(xi); throws DomainError when f_Omega(xi) <= 0.
double lorentz_of_xi(const ConservedState &U, double xi);

/// f_U(xi) = xi - p(D/W, xi/(DW)) + |B|^2 - (|B|^2/W^2 + (m.B)^2/xi^2)/2 - E.
///
/// The pressure is continued by p = 0 for h <= 1, as allowed by the limit
/// p(rho, h) -> 0 for h -> 1.
double f_U(const EosModel &eos, const ConservedState &U, double xi);

/// Positive root of f_4(xi) = f_Omega(xi) - D^2 (xi + |B|^2)^2.
double find_xi4(const ConservedState &U);

/// Solves f_U(xi) = 0 on (xi4, inf) and evaluates the primitive variables.
///
/// bracket_start overrides the initial upper bracket (0 selects
/// max(2 xi4, E + |B|^2 + D)).  Throws InadmissibleError when U has no
/// physical preimage and ConvergenceError if the iteration cap is hit.
PrimitiveState recover_primitives(const EosModel &eos, const ConservedState &U,
                                  double tol = 1e-12, RecoveryWorkspace *ws = nullptr,
                                  double bracket_start = 0.0);

}  // namespace pcp
