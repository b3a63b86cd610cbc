#include "prandtl/oracles.hpp"

#include <cmath>
#include <numbers>

#include "prandtl/errors.hpp"

namespace prandtl {

namespace {

struct GaussRule {
  std::vector<double> nodes, weights;  // on [-1, 1]
};

GaussRule gauss_legendre(int n) {
  GaussRule r{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

}  // namespace

std::vector<double> sine_coefficients(const std::function<double(double)>& phi, double L,
                                      int nterms) {
  if (!(L > 0.0) || nterms < 1) throw ParameterError("sine_coefficients: bad arguments");
  const GaussRule rule = gauss_legendre(20);
  const int panels = std::max(200, 8 * nterms);
  const double hpanel = L / panels;
  std::vector<double> c(nterms, 0.0);
  for (int p = 0; p < panels; ++p) {
    const double a = p * hpanel;
    for (size_t q = 0; q < rule.nodes.size(); ++q) {
      const double y = a + 0.5 * hpanel * (rule.nodes[q] + 1.0);
      const double w = 0.5 * hpanel * rule.weights[q] * phi(y);
      for (int n = 1; n <= nterms; ++n)
        c[n - 1] += w * std::sin(n * std::numbers::pi * y / L);
    }
  }
  for (double& v : c) v *= 2.0 / L;
  return c;
}

double heat_series(std::span<const double> c, double L, double delta, double t, double y) {
  double s = 0.0;
  for (size_t n = 1; n <= c.size(); ++n) {
    const double mu = n * std::numbers::pi / L;
    s += c[n - 1] * std::exp(-(mu * mu + delta) * t) * std::sin(mu * y);
  }
  return s;
}

double wave_series(std::span<const double> a, std::span<const double> b, double L, double t,
                   double y) {
  double s = 0.0;
  for (size_t n = 1; n <= a.size(); ++n) {
    const double mu = n * std::numbers::pi / L;
    const double bn = n <= b.size() ? b[n - 1] : 0.0;
    s += (a[n - 1] * std::cos(mu * t) + bn / mu * std::sin(mu * t)) * std::sin(mu * y);
  }
  return s;
}

std::vector<double> observed_orders(std::span<const double> errors) {
  std::vector<double> out;
  for (size_t i = 0; i + 1 < errors.size(); ++i) out.push_back(std::log2(errors[i] / errors[i + 1]));
  return out;
}

}  // namespace prandtl
