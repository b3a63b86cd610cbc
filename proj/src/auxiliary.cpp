#include "prandtl/auxiliary.hpp"

#include <cmath>

#include "prandtl/errors.hpp"
#include "prandtl/solver.hpp"

namespace prandtl {

Field derive_U(const Field& f) { return diff_y(f, 1); }

double wall_neumann_defect(const Field& U) { return trace_norm(diff_y(U, 1), 0); }

Field lambda_field(const Field& u, const Field& U) {
  Field out = diff_x(u, 3);
  out -= multiply(diff_y(u, 1), integrate_y_from_0(U));
  return out;
}

Field double_layer(const Field& u, const Field& U) {
  return integrate_y_from_0(multiply(diff_y(u, 1), integrate_y_from_0(U)));
}

Field f_forcing(const Field& u) { return integrate_y_from_0(diff_x(u, 4)); }

AuxSnapshot make_aux(const SimState& s) {
  Field U = derive_U(s.f);
  Field lambda = lambda_field(s.u, U);
  return {s.t, s.f, std::move(U), std::move(lambda)};
}

Field LambdaSource::total() const {
  Field h = lambda_stretch;
  h += shear_f;
  h += int_lambda;
  h += layer;
  h += curvature;
  h += v_term;
  h += shear_U;
  return h;
}

LambdaSource lambda_source(const Field& u, const Field& U, const Field& lambda,
                           bool damping) {
  const Field ux = diff_x(u, 1);
  const Field uy = diff_y(u, 1);
  const Field uxy = diff_x(uy, 1);
  const Field uxx = diff_x(u, 2);
  const Field intU = integrate_y_from_0(U);
  const Field v = normal_velocity(u);

  Field shear_coeff = multiply(ux, uy);
  shear_coeff *= -4.0;
  if (damping) shear_coeff += uy;

  LambdaSource h{
      -4.0 * multiply(ux, lambda),
      multiply(shear_coeff, intU),
      3.0 * multiply(uxy, integrate_y_from_0(lambda)),
      3.0 * multiply(uxy, double_layer(u, U)),
      -3.0 * multiply(uxx, uxx),
      -3.0 * multiply(diff_x(v, 1), diff_x(diff_y(u, 1), 2)),
      2.0 * multiply(diff_y(u, 2), U),
  };
  return h;
}

namespace {

double half_spacing(const SimState& prev, const SimState& mid, const SimState& next) {
  const double h1 = mid.t - prev.t;
  const double h2 = next.t - mid.t;
  if (!(h1 > 0.0) || std::abs(h1 - h2) > 1e-9 * std::max(h1, h2))
    throw ParameterError("residual: snapshots must be equally spaced in time");
  return h1;
}

// (d_t + u d_x + v d_y - d_y^2 + delta) g at the middle snapshot.
Field transport_operator(const Field& g_prev, const Field& g_mid, const Field& g_next,
                         double h, const Field& u, const Field& v, bool damping) {
  Field out = g_next - g_prev;
  out *= 1.0 / (2.0 * h);
  out += multiply(u, diff_x(g_mid, 1));
  out += multiply(v, diff_y(g_mid, 1));
  out -= diff_y(g_mid, 2);
  if (damping) out += g_mid;
  return out;
}

}  // namespace

double residual_f_relation(const SimState& prev, const SimState& mid, const SimState& next) {
  const double h = half_spacing(prev, mid, next);
  const Field v = normal_velocity(mid.u);
  Field r = transport_operator(prev.f, mid.f, next.f, h, mid.u, v, mid.damping);
  r -= f_forcing(mid.u);
  return l2_norm(r);
}

double residual_U_relation(const SimState& prev, const SimState& mid, const SimState& next) {
  const double h = half_spacing(prev, mid, next);
  const Field U_prev = derive_U(prev.f);
  const Field U_mid = derive_U(mid.f);
  const Field U_next = derive_U(next.f);
  const Field v = normal_velocity(mid.u);
  const Field lambda = lambda_field(mid.u, U_mid);

  Field r = transport_operator(U_prev, U_mid, U_next, h, mid.u, v, mid.damping);
  r -= diff_x(lambda, 1);
  r -= multiply(diff_x(diff_y(mid.u, 1), 1), integrate_y_from_0(U_mid));
  r -= multiply(diff_x(mid.u, 1), U_mid);
  return l2_norm(r);
}

double residual_lambda_relation(const SimState& prev, const SimState& mid,
                                const SimState& next) {
  const double h = half_spacing(prev, mid, next);
  const Field l_prev = lambda_field(prev.u, derive_U(prev.f));
  const Field U_mid = derive_U(mid.f);
  const Field l_mid = lambda_field(mid.u, U_mid);
  const Field l_next = lambda_field(next.u, derive_U(next.f));
  const Field v = normal_velocity(mid.u);

  Field r = transport_operator(l_prev, l_mid, l_next, h, mid.u, v, mid.damping);
  r -= lambda_source(mid.u, U_mid, l_mid, mid.damping).total();
  return l2_norm(r);
}

}  // namespace prandtl
