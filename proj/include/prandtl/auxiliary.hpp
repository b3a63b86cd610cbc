#pragma once

// Auxiliary fields of the cancellation mechanism.
//
// The evolved primitive f solves
//     (d_t + u d_x + v d_y - d_y^2) f + f = -d_x^3 v,  f|_{y=0} = 0,
//     d_y f|_{y=Ymax} = 0,  f|_{t=0} = 0,
// and U = d_y f, lambda = d_x^3 u - (d_y u) int_0^y U.
// Residual checks evaluate the exact relations satisfied by U and lambda
// along a computed trajectory with centered time differences.

#include "prandtl/grid.hpp"
#include "prandtl/state.hpp"

namespace prandtl {

/// U = d_y f.
Field derive_U(const Field& f);

/// L2-in-x norm of d_y U at the wall; vanishes for the exact solution.
double wall_neumann_defect(const Field& U);

/// lambda = d_x^3 u - (d_y u) int_0^y U.
Field lambda_field(const Field& u, const Field& U);

/// int_0^y ( (d_y u)(y~) int_0^{y~} U(r) dr ) dy~.
Field double_layer(const Field& u, const Field& U);

/// -d_x^3 v = int_0^y d_x^4 u, the source of the f equation.
Field f_forcing(const Field& u);

struct AuxSnapshot {
  double t;
  Field f;
  Field U;
  Field lambda;
};

AuxSnapshot make_aux(const SimState& s);

/// Terms of the lambda source H, kept separate so each can be audited.
struct LambdaSource {
  Field lambda_stretch;  // -4 (d_x u) lambda
  Field shear_f;         // (delta d_y u - 4 (d_x u) d_y u) int_0^y U
  Field int_lambda;      // 3 (d_x d_y u) int_0^y lambda
  Field layer;           // 3 (d_x d_y u) L(u, U)
  Field curvature;       // -3 (d_x^2 u)^2
  Field v_term;          // -3 (d_x v) d_x^2 d_y u
  Field shear_U;         // 2 (d_y^2 u) U

  Field total() const;
};

/// H for the lambda relation; damping selects the delta = 1 term.
LambdaSource lambda_source(const Field& u, const Field& U, const Field& lambda,
                           bool damping);

/// Residuals at the middle state of three snapshots equally spaced in time.
/// Each returns the L2 norm of LHS - RHS; damping is read from `mid`.
double residual_f_relation(const SimState& prev, const SimState& mid, const SimState& next);
double residual_U_relation(const SimState& prev, const SimState& mid, const SimState& next);
double residual_lambda_relation(const SimState& prev, const SimState& mid,
                                const SimState& next);

}  // namespace prandtl
