#pragma once

// Scalar machinery of the Gevrey-2 framework and the weighted norms built
// on it.
//
// Every infinite sum over tangential derivative orders m is evaluated per
// Fourier mode: on e^{ikx}, d^m/dx^m is multiplication by (ik)^m, so
//
//     sum_m c_m ||d_x^m g||^2 = 2pi sum_k (sum_m c_m k^{2m}) ||g_k||^2
//
// and the inner series converges because c_m carries 1/(m!)^4.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "prandtl/grid.hpp"
#include "prandtl/state.hpp"

namespace prandtl {

struct GevreyParams {
  double ell = 1.0;     // weight exponent, > 1/2
  int N = 1056;         // weight offset in tau_N
  double rho0 = 0.5;    // initial radius, in (0, 1]
  double eps0 = 1e-3;   // smallness of ||u0|| in X_{2 rho0}

  /// ell = 1, N = min_N_for_ell(1), rho0 = 1/2, eps0 = 1e-3.
  static GevreyParams defaults();
  /// Throws ParameterError unless ell > 1/2, rho0 in (0,1], eps0 > 0 and
  /// (ell+3)/sqrt(N) + (ell^2+ell)/N <= 1/8.
  void validate() const;
};

/// tau_N(y) = (N + y^2)^{1/2}; N = 1 gives the bracket <y>.
double weight_tau(double y, int N);

/// (ell+3)/sqrt(N) + (ell^2+ell)/N.
double n_ell_constraint(double ell, double N);

/// Smallest N >= 1 with n_ell_constraint(ell, N) <= 1/8.
int min_N_for_ell(double ell);

/// log of L_{r,k} = r^{k+1} (k+1)^10 / (k!)^2.
double log_coeff_L(double r, int k);
double coeff_L(double r, int k);

struct RadiusSchedule {
  double rho;
  double drho;
  double d2rho;
};

/// rho(t) = rho0/2 + (rho0/2) e^{-t/12} with exact first and second derivatives.
RadiusSchedule radius_rho(double t, double rho0);

inline constexpr double kSeriesTolerance = 1e-16;

struct SeriesSum {
  double value = 0.0;
  double first_omitted = 0.0;  // first term not included
  int terms = 0;
};

/// sum_{m>=0} exp(log_factor(m)) L_{r,m+shift}^2 k^{2m}. Terms are added until
/// one falls below tol * (partial sum) after the peak; that term is reported
/// as first_omitted. log_factor may be empty (factor 1).
SeriesSum weighted_series(int k, double r, int shift,
                          const std::function<double(int)>& log_factor, double tol);

/// W_j(k) = sum_m L_{r,m+j}^2 k^{2m}.
double mode_weight(int j, int k, double r, double tol = kSeriesTolerance);
SeriesSum mode_weight_detail(int j, int k, double r, double tol = kSeriesTolerance);

/// ||h||^2_{X_r} = sum_{j<=3} sum_m L_{r,m+j}^2 ||tau^{ell+j} d_x^m d_y^j h||^2.
double norm_X_squared(const Field& h, double r, const GevreyParams& p);
double norm_X(const Field& h, double r, const GevreyParams& p);

struct NormContribution {
  char norm;              // 'X', 'Y' or 'Z'
  std::string component;  // "u", "lambda" or "U"
  int j;                  // y-derivative order for u, -1 otherwise
  double value_sq;
};

struct NormReport {
  double t = 0.0;
  double rho = 0.0;
  double x_norm = 0.0;
  double y_norm = 0.0;
  double z_norm = 0.0;
  std::vector<NormContribution> breakdown;
  double bootstrap_lhs = 0.0;

  double sum_breakdown(char norm) const;
};

/// |a|_X, |a|_Y, |a|_Z for a = (u, U, lambda) at radius rho(t).
NormReport norms_XYZ(double t, const Field& u, const Field& U, const Field& lambda,
                     const GevreyParams& p);
/// Same, deriving U and lambda from the state's auxiliary primitive f.
NormReport norms_XYZ(const SimState& state, const GevreyParams& p);

struct YoungSides {
  double lhs;
  double rhs;
};

/// Both sides of the discrete Young convolution inequality
///   sum_m sum_{j<=m} p_j q_{m-j} r_m <= ||q||_2 ||r||_2 sum_j p_j.
/// Missing entries are treated as zero. Negative entries are rejected.
YoungSides young_convolution(std::span<const double> p, std::span<const double> q,
                             std::span<const double> r);

}  // namespace prandtl
