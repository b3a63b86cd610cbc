#include <doctest.h>

#include <cmath>
#include <random>

#include "prandtl/auxiliary.hpp"
#include "prandtl/errors.hpp"
#include "prandtl/gevrey.hpp"
#include "test_oracles.hpp"

using namespace prandtl;

TEST_CASE("weight_tau") {
  CHECK(weight_tau(0.0, 16) == 4.0);
  CHECK(weight_tau(3.0, 16) == 5.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0.0, 50.0);
  for (int i = 0; i < 100; ++i) {
    const double y = U(rng);
    CHECK(weight_tau(y, 1) == doctest::Approx(std::sqrt(1.0 + y * y)).epsilon(1e-15));
  }
}

TEST_CASE("min_N_for_ell") {
  CHECK(min_N_for_ell(1.0) == 1056);
  // Positive root of 0.125 s^2 - 4 s - 2 = 0, s = sqrt(N).
  const double s = (4.0 + std::sqrt(16.0 + 1.0)) / 0.25;
  CHECK(static_cast<int>(std::ceil(s * s)) == 1056);
  CHECK(n_ell_constraint(1.0, 1.0) == doctest::Approx(6.0));
  for (double ell : {0.6, 1.0, 1.5, 2.0, 3.7}) {
    const int N = min_N_for_ell(ell);
    CHECK(n_ell_constraint(ell, N) <= 0.125);
    CHECK(n_ell_constraint(ell, N - 1) > 0.125);
  }
  CHECK_THROWS_AS(min_N_for_ell(0.5), ParameterError);
}

TEST_CASE("GevreyParams validation") {
  GevreyParams p = GevreyParams::defaults();
  CHECK(p.N == 1056);
  CHECK_NOTHROW(p.validate());
  GevreyParams q = p;
  q.N = 1055;
  CHECK_THROWS_AS(q.validate(), ParameterError);
  q = p;
  q.ell = 0.5;
  CHECK_THROWS_AS(q.validate(), ParameterError);
  q = p;
  q.rho0 = 1.5;
  CHECK_THROWS_AS(q.validate(), ParameterError);
  q = p;
  q.eps0 = 0.0;
  CHECK_THROWS_AS(q.validate(), ParameterError);
}

TEST_CASE("coeff_L") {
  CHECK(coeff_L(1.0, 0) == doctest::Approx(1.0));
  CHECK(coeff_L(2.0, 0) == doctest::Approx(2.0));
  CHECK(coeff_L(1.0, 1) == doctest::Approx(1024.0));
  for (int k = 0; k < 60; ++k)
    CHECK(coeff_L(0.7, k) == doctest::Approx(testref::coeff_L_direct(0.7, k)).epsilon(1e-12));
  CHECK(std::isfinite(log_coeff_L(0.5, 500)));
  CHECK(coeff_L(0.5, 500) == 0.0);
}

TEST_CASE("radius schedule") {
  const double rho0 = 0.5;
  auto r0 = radius_rho(0.0, rho0);
  CHECK(r0.rho == doctest::Approx(rho0));
  CHECK(r0.drho == doctest::Approx(-rho0 / 24.0));
  CHECK(radius_rho(1e4, rho0).rho == doctest::Approx(rho0 / 2));
  for (double t = 0.0; t < 200.0; t += 0.37) {
    const auto r = radius_rho(t, rho0);
    const double e = std::exp(-t / 12.0);
    CHECK(r.d2rho - r.drho * r.drho / r.rho ==
          doctest::Approx(rho0 * e / (288.0 * (1.0 + e))).epsilon(1e-12));
    const double h = 1e-4;
    const double fd = (radius_rho(t + h, rho0).rho - radius_rho(t - h, rho0).rho) / (2 * h);
    CHECK(fd == doctest::Approx(r.drho).epsilon(1e-6));
  }
}

TEST_CASE("mode_weight") {
  for (int j = 0; j <= 3; ++j)
    CHECK(mode_weight(j, 0, 0.8) == doctest::Approx(std::pow(coeff_L(0.8, j), 2)).epsilon(1e-14));
  double direct = 0.0;
  for (int m = 0; m <= 200; ++m) {
    const double L = coeff_L(0.5, m);
    direct += L * L * std::pow(2.0, 2 * m);
  }
  CHECK(mode_weight(0, 2, 0.5) == doctest::Approx(direct).epsilon(1e-12));
  double prev = 0.0;
  for (int k = 1; k <= 40; ++k) {
    const auto s = mode_weight_detail(1, k, 0.5);
    CHECK(s.value > prev);
    CHECK(s.first_omitted < kSeriesTolerance * s.value);
    CHECK(mode_weight(1, -k, 0.5) == s.value);
    prev = s.value;
  }
  CHECK_THROWS_AS(mode_weight(4, 1, 0.5), ParameterError);
}

TEST_CASE("norm_X: single mode against direct summation") {
  auto g = Grid::create({3, 129, 12.0, 0.0, 8});
  const double eps = 1e-2;
  Field u(g);
  for (int i = 0; i < g->Ny(); ++i) {
    const double y = g->y(i);
    u(1, i) = eps * y * y * std::exp(-y);  // eps e^{ix} y^2 e^{-y} (plus conjugate)
  }
  const GevreyParams p = GevreyParams::defaults();
  for (double r : {0.5, 1.0}) {
    const double brute = testref::brute_norm_X_sq(u, r, p, 30);
    CHECK(norm_X_squared(u, r, p) == doctest::Approx(brute).epsilon(1e-10));
  }
  CHECK(norm_X(Field(g), 0.5, p) == 0.0);
  Field v = u;
  v *= -3.0;
  CHECK(norm_X(v, 0.5, p) == doctest::Approx(3.0 * norm_X(u, 0.5, p)).epsilon(1e-14));
}

TEST_CASE("norm_X: triangle inequality on random pairs") {
  auto g = Grid::create({4, 65, 9.0, 0.0, 8});
  std::mt19937_64 rng(11);
  const GevreyParams p = GevreyParams::defaults();
  for (int trial = 0; trial < 10; ++trial) {
    const Field a = testref::random_field(g, rng);
    const Field b = testref::random_field(g, rng);
    CHECK(norm_X(a + b, 0.5, p) <= norm_X(a, 0.5, p) + norm_X(b, 0.5, p));
  }
}

TEST_CASE("norm_X: overflow names the cell") {
  auto g = Grid::create({2, 33, 9.0, 0.0, 8});
  Field u = Field::from_function(g, [](double x, double y) { return 1e300 * std::sin(2 * x) * y; });
  try {
    norm_X(u, 0.5, GevreyParams::defaults());
    FAIL("expected OverflowError");
  } catch (const OverflowError& e) {
    CHECK(std::string(e.what()).find("(j=") != std::string::npos);
  }
}

TEST_CASE("norms_XYZ: initial state identity and ordering") {
  auto g = Grid::create({4, 257, 9.0, 0.0, 8});
  const GevreyParams p = GevreyParams::defaults();
  std::mt19937_64 rng(5);
  const Field u0 = testref::random_field(g, rng);
  const SimState s(0.0, u0, Field(g));
  const NormReport r = norms_XYZ(s, p);

  // |a(0)|_X^2 = ||u0||^2_{X_rho0} + sum_m L_{rho0,m+2}^2 ||d_x^{m+3} u0||^2
  double extra = 0.0;
  for (int m = 0; m <= 60; ++m) {
    const double L = testref::coeff_L_direct(p.rho0, m + 2);
    extra += L * L * testref::weighted_sq(testref::dx_power(u0, m + 3),
                                          std::vector<double>(g->Ny(), 1.0));
  }
  const double closed = norm_X_squared(u0, p.rho0, p) + extra;
  CHECK(r.x_norm * r.x_norm == doctest::Approx(closed).epsilon(1e-12));
  const double bound = (p.rho0 * p.rho0 + 1.0) / (p.rho0 * p.rho0) *
                       norm_X_squared(u0, 2.0 * p.rho0, p);
  CHECK(r.x_norm * r.x_norm <= bound);
  CHECK(r.x_norm <= r.y_norm);
  for (char c : {'X', 'Y', 'Z'}) {
    const double tot = c == 'X' ? r.x_norm : (c == 'Y' ? r.y_norm : r.z_norm);
    CHECK(r.sum_breakdown(c) == doctest::Approx(tot * tot).epsilon(1e-12));
  }
  for (const auto& c : r.breakdown) CHECK(c.value_sq >= 0.0);

  const NormReport z = norms_XYZ(SimState(0.0, Field(g), Field(g)), p);
  CHECK(z.x_norm == 0.0);
  CHECK(z.y_norm == 0.0);
  CHECK(z.z_norm == 0.0);
}

TEST_CASE("young_convolution") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::uniform_int_distribution<int> len(1, 64);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> p(len(rng)), q(len(rng)), r(len(rng));
    for (auto* v : {&p, &q, &r})
      for (double& x : *v) x = U(rng);
    const auto s = young_convolution(p, q, r);
    CHECK(s.lhs <= s.rhs);
  }
  const std::vector<double> q = {1.0, 2.0, 3.0}, r = {0.5, 0.1, 4.0};
  const std::vector<double> delta = {1.0};
  const auto s = young_convolution(delta, q, r);
  CHECK(s.lhs == doctest::Approx(0.5 + 0.2 + 12.0));
  const std::vector<double> zero(3, 0.0);
  const auto z = young_convolution(delta, zero, r);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  const std::vector<double> neg = {1.0, -1.0};
  CHECK_THROWS_AS(young_convolution(neg, q, r), ParameterError);
}
