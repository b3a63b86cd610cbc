#include "prandtl/gevrey.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "prandtl/auxiliary.hpp"
#include "prandtl/errors.hpp"

namespace prandtl {

GevreyParams GevreyParams::defaults() {
  GevreyParams p;
  p.ell = 1.0;
  p.N = min_N_for_ell(1.0);
  p.rho0 = 0.5;
  p.eps0 = 1e-3;
  return p;
}

void GevreyParams::validate() const {
  if (!(ell > 0.5)) throw ParameterError("gevrey: ell must be > 1/2");
  if (N < 1) throw ParameterError("gevrey: N must be >= 1");
  if (!(rho0 > 0.0 && rho0 <= 1.0)) throw ParameterError("gevrey: rho0 must lie in (0, 1]");
  if (!(eps0 > 0.0)) throw ParameterError("gevrey: eps0 must be > 0");
  if (n_ell_constraint(ell, N) > 0.125)
    throw ParameterError("gevrey: N = " + std::to_string(N) +
                         " violates (ell+3)/sqrt(N) + (ell^2+ell)/N <= 1/8; need N >= " +
                         std::to_string(min_N_for_ell(ell)));
}

double weight_tau(double y, int N) { return std::sqrt(static_cast<double>(N) + y * y); }

double n_ell_constraint(double ell, double N) {
  return (ell + 3.0) / std::sqrt(N) + (ell * ell + ell) / N;
}

int min_N_for_ell(double ell) {
  if (!(ell > 0.5)) throw ParameterError("min_N_for_ell: ell must be > 1/2");
  // The left side is decreasing in N; bracket by doubling, then bisect on integers.
  long hi = 1;
  while (n_ell_constraint(ell, static_cast<double>(hi)) > 0.125) hi *= 2;
  long lo = hi / 2;  // lo violates (or is 0)
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (n_ell_constraint(ell, static_cast<double>(mid)) > 0.125)
      lo = mid;
    else
      hi = mid;
  }
  return static_cast<int>(hi);
}

double log_coeff_L(double r, int k) {
  return (k + 1) * std::log(r) + 10.0 * std::log(k + 1.0) - 2.0 * std::lgamma(k + 1.0);
}

double coeff_L(double r, int k) { return std::exp(log_coeff_L(r, k)); }

RadiusSchedule radius_rho(double t, double rho0) {
  const double e = std::exp(-t / 12.0);
  return {0.5 * rho0 + 0.5 * rho0 * e, -rho0 * e / 24.0, rho0 * e / 288.0};
}

SeriesSum weighted_series(int k, double r, int shift,
                          const std::function<double(int)>& log_factor, double tol) {
  if (!(tol > 0.0)) throw ParameterError("weighted_series: tol must be > 0");
  const int ak = std::abs(k);
  auto log_term = [&](int m) {
    double lt = 2.0 * log_coeff_L(r, m + shift);
    if (m > 0) lt += 2.0 * m * std::log(static_cast<double>(ak));
    if (log_factor) lt += log_factor(m);
    return lt;
  };
  SeriesSum s;
  if (ak == 0) {
    s.value = std::exp(log_term(0));
    s.terms = 1;
    return s;
  }
  double prev = -1.0;
  constexpr int kMaxTerms = 100000;
  for (int m = 0; m < kMaxTerms; ++m) {
    const double term = std::exp(log_term(m));
    if (m > 0 && term <= prev && term < tol * s.value) {
      s.first_omitted = term;
      return s;
    }
    s.value += term;
    s.terms = m + 1;
    prev = term;
  }
  throw OverflowError("weighted_series: no convergence for k = " + std::to_string(k));
}

double mode_weight(int j, int k, double r, double tol) {
  return mode_weight_detail(j, k, r, tol).value;
}

SeriesSum mode_weight_detail(int j, int k, double r, double tol) {
  if (j < 0 || j > 3) throw ParameterError("mode_weight: j must lie in 0..3");
  return weighted_series(k, r, j, {}, tol);
}

namespace {

// I[k] = 2pi c_k sum_i trap_i w_i |g_k(y_i)|^2, c_0 = 1, c_k = 2.
std::vector<double> mode_energies(const Field& g, std::span<const double> yweight) {
  const Grid& grid = g.grid();
  const auto trap = grid.trapezoid();
  std::vector<double> out(grid.modes(), 0.0);
  for (int k = 0; k <= grid.K(); ++k) {
    auto m = g.mode(k);
    double s = 0.0;
    for (int i = 0; i < grid.Ny(); ++i)
      s += trap[i] * (yweight.empty() ? 1.0 : yweight[i]) * std::norm(m[i]);
    out[k] = Grid::Lx * (k == 0 ? 1.0 : 2.0) * s;
  }
  return out;
}

std::vector<double> tau_power(const Grid& grid, const GevreyParams& p, int j) {
  std::vector<double> w(grid.Ny());
  for (int i = 0; i < grid.Ny(); ++i)
    w[i] = std::pow(weight_tau(grid.y(i), p.N), 2.0 * (p.ell + j));
  return w;
}

double combine(const std::vector<double>& energies, double r, int shift,
               const std::function<double(int)>& log_factor, const char* what, int j) {
  double total = 0.0;
  for (size_t k = 0; k < energies.size(); ++k) {
    if (energies[k] == 0.0) continue;
    const double w = weighted_series(static_cast<int>(k), r, shift, log_factor,
                                     kSeriesTolerance).value;
    const double c = w * energies[k];
    if (!std::isfinite(c))
      throw OverflowError(std::string("norm: non-finite contribution in ") + what +
                          " cell (j=" + std::to_string(j) + ", k=" + std::to_string(k) + ")");
    total += c;
  }
  return total;
}

}  // namespace

double norm_X_squared(const Field& h, double r, const GevreyParams& p) {
  double total = 0.0;
  for (int j = 0; j <= 3; ++j) {
    const Field dj = j == 0 ? h : diff_y(h, j);
    total += combine(mode_energies(dj, tau_power(h.grid(), p, j)), r, j, {}, "X", j);
  }
  return total;
}

double norm_X(const Field& h, double r, const GevreyParams& p) {
  return std::sqrt(norm_X_squared(h, r, p));
}

double NormReport::sum_breakdown(char norm) const {
  double s = 0.0;
  for (const auto& c : breakdown)
    if (c.norm == norm) s += c.value_sq;
  return s;
}

NormReport norms_XYZ(double t, const Field& u, const Field& U, const Field& lambda,
                     const GevreyParams& p) {
  const double rho = radius_rho(t, p.rho0).rho;
  const double log_rho = std::log(rho);
  NormReport rep;
  rep.t = t;
  rep.rho = rho;

  // Tangential velocity: derivatives d_y^j u, j = 0..4 (j = 4 for Z only).
  std::vector<Field> du;
  du.reserve(5);
  du.push_back(u);
  for (int j = 1; j <= 4; ++j) du.push_back(diff_y(u, j));

  for (int j = 0; j <= 3; ++j) {
    const auto w = tau_power(u.grid(), p, j);
    const auto ex = mode_energies(du[j], w);
    const auto ez = mode_energies(du[j + 1], w);
    rep.breakdown.push_back({'X', "u", j, combine(ex, rho, j, {}, "X", j)});
    rep.breakdown.push_back(
        {'Y', "u", j,
         combine(ex, rho, j, [j, log_rho](int m) { return std::log(m + j + 1.0) - log_rho; },
                 "Y", j)});
    rep.breakdown.push_back({'Z', "u", j, combine(ez, rho, j, {}, "Z", j)});
  }

  {
    const auto ex = mode_energies(lambda, {});
    const auto ez = mode_energies(diff_y(lambda, 1), {});
    rep.breakdown.push_back({'X', "lambda", -1, combine(ex, rho, 2, {}, "X", -1)});
    rep.breakdown.push_back(
        {'Y', "lambda", -1,
         combine(ex, rho, 2, [log_rho](int m) { return std::log(m + 3.0) - log_rho; }, "Y",
                 -1)});
    rep.breakdown.push_back({'Z', "lambda", -1, combine(ez, rho, 2, {}, "Z", -1)});
  }
  {
    const auto ex = mode_energies(U, {});
    const auto ez = mode_energies(diff_y(U, 1), {});
    rep.breakdown.push_back({'X', "U", -1, combine(ex, rho, 3, {}, "X", -1)});
    rep.breakdown.push_back(
        {'Y', "U", -1,
         combine(ex, rho, 3,
                 [log_rho](int m) { return 3.0 * (std::log(m + 4.0) - log_rho); }, "Y", -1)});
    rep.breakdown.push_back({'Z', "U", -1, combine(ez, rho, 3, {}, "Z", -1)});
  }

  rep.x_norm = std::sqrt(rep.sum_breakdown('X'));
  rep.y_norm = std::sqrt(rep.sum_breakdown('Y'));
  rep.z_norm = std::sqrt(rep.sum_breakdown('Z'));
  return rep;
}

NormReport norms_XYZ(const SimState& state, const GevreyParams& p) {
  const Field U = derive_U(state.f);
  const Field lambda = lambda_field(state.u, U);
  return norms_XYZ(state.t, state.u, U, lambda, p);
}

YoungSides young_convolution(std::span<const double> p, std::span<const double> q,
                             std::span<const double> r) {
  for (auto seq : {p, q, r})
    for (double v : seq)
      if (!(v >= 0.0)) throw ParameterError("young_convolution: entries must be nonnegative");
  double lhs = 0.0;
  for (size_t m = 0; m < r.size(); ++m) {
    double conv = 0.0;
    for (size_t j = 0; j <= m && j < p.size(); ++j) {
      const size_t idx = m - j;
      if (idx < q.size()) conv += p[j] * q[idx];
    }
    lhs += conv * r[m];
  }
  auto sq = [](std::span<const double> s) {
    return std::sqrt(std::inner_product(s.begin(), s.end(), s.begin(), 0.0));
  };
  const double psum = std::accumulate(p.begin(), p.end(), 0.0);
  return {lhs, sq(q) * sq(r) * psum};
}

}  // namespace prandtl
