#pragma once

// Closed-form reference solutions used by the suites.

#include <functional>
#include <span>
#include <vector>

namespace prandtl {

/// b_n = (2/L) int_0^L phi(y) sin(n pi y / L) dy for n = 1..nterms, by
/// composite Gauss-Legendre quadrature.
std::vector<double> sine_coefficients(const std::function<double(double)>& phi, double L,
                                      int nterms);

/// sum_n c_n e^{-(mu_n^2 + delta) t} sin(mu_n y), mu_n = n pi / L.
double heat_series(std::span<const double> c, double L, double delta, double t, double y);

/// sum_n [a_n cos(mu_n t) + (b_n / mu_n) sin(mu_n t)] sin(mu_n y).
double wave_series(std::span<const double> a, std::span<const double> b, double L, double t,
                   double y);

/// Observed orders log2(e_i / e_{i+1}) for errors at successively halved
/// resolutions.
std::vector<double> observed_orders(std::span<const double> errors);

}  // namespace prandtl
