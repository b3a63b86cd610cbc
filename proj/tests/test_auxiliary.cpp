#include <doctest.h>

#include <cmath>

#include "prandtl/auxiliary.hpp"
#include "prandtl/harness.hpp"
#include "prandtl/solver.hpp"

using namespace prandtl;

namespace {

double max_err(const Field& a, const std::function<double(double, double)>& f, bool interior = true) {
  const auto& g = a.grid();
  const auto phys = a.to_physical();
  double e = 0.0;
  const int lo = interior ? 1 : 0, hi = interior ? g.Ny() - 1 : g.Ny();
  for (int n = 0; n < g.Nx(); ++n)
    for (int i = lo; i < hi; ++i)
      e = std::max(e, std::abs(phys[static_cast<size_t>(n) * g.Ny() + i] - f(g.x(n), g.y(i))));
  return e;
}

SimState small_state(const GridPtr& g, double amp) {
  return SimState(0.0, Field::from_function(g, [amp](double x, double y) {
                    return amp * std::sin(x) * y * y * std::exp(-y * y / 2);
                  }),
                  Field(g));
}

}  // namespace

TEST_CASE("derive_U and definitional consistency") {
  auto g = Grid::create({2, 257, 9.0, 0.0, 8});
  CHECK(derive_U(Field(g)).max_abs_coeff() == 0.0);
  // f = 1 - e^{-y} gives U = e^{-y}; fourth-order convergence under refinement.
  double err[2];
  for (int lvl = 0; lvl < 2; ++lvl) {
    auto gl = Grid::create({2, lvl == 0 ? 129 : 257, 9.0, 0.0, 8});
    const Field f = Field::from_function(gl, [](double, double y) { return 1.0 - std::exp(-y); });
    err[lvl] = max_err(derive_U(f), [](double, double y) { return std::exp(-y); }, false);
  }
  CHECK(err[1] < 1e-6);
  CHECK(std::log2(err[0] / err[1]) >= 3.5);
  const Field U = Field::from_function(g, [](double x, double y) { return std::cos(x) * y * std::exp(-y); });
  CHECK(max_err(derive_U(integrate_y_from_0(U)), [](double x, double y) { return std::cos(x) * y * std::exp(-y); }) < 1e-6);
}

TEST_CASE("lambda_field") {
  auto g = Grid::create({3, 257, 9.0, 0.0, 8});
  const Field u = small_state(g, 1.0).u;
  const Field l0 = lambda_field(u, Field(g));
  const Field d3 = diff_x(u, 3);
  for (size_t i = 0; i < d3.coeffs().size(); ++i) CHECK(l0.coeffs()[i] == d3.coeffs()[i]);

  // u = sin(x) g(y), U = cos(x) e^{-y}: hand-assembled
  //   lambda = -cos(x) g - sin(x) cos(x) g'(y) (1 - e^{-y}).
  const Field U = Field::from_function(g, [](double x, double y) { return std::cos(x) * std::exp(-y); });
  const Field lam = lambda_field(u, U);
  auto gp = [](double y) { return (2 * y - y * y * y) * std::exp(-y * y / 2); };
  auto gf = [](double y) { return y * y * std::exp(-y * y / 2); };
  CHECK(max_err(lam, [&](double x, double y) {
          return -std::cos(x) * gf(y) - std::sin(x) * std::cos(x) * gp(y) * (1.0 - std::exp(-y));
        }) < 1e-6);
  for (int k = 0; k <= 3; ++k) CHECK(std::abs(lam(k, 0)) < 1e-15);
}

TEST_CASE("lambda_field: exact assembly on a single mode") {
  // Exact primitives: diff_x is exact, and with U = 0 nothing else enters.
  auto g = Grid::create({2, 65, 9.0, 0.0, 8});
  Field u(g);
  for (int i = 0; i < g->Ny(); ++i) u(1, i) = cplx(g->y(i) * std::exp(-g->y(i)), 0.0);
  const Field lam = lambda_field(u, Field(g));
  for (int i = 0; i < g->Ny(); ++i) CHECK(std::abs(lam(1, i) - cplx(0.0, -1.0) * u(1, i)) <= 1e-12 * std::abs(u(1, i)) + 1e-300);
}

TEST_CASE("double_layer") {
  auto g = Grid::create({1, 513, 12.0, 0.0, 8});
  CHECK(double_layer(small_state(g, 1.0).u, Field(g)).max_abs_coeff() == 0.0);
  // u = 1 - e^{-y} (d_y u = e^{-y}), U = e^{-2y}:
  //   int_0^y e^{-s} (1 - e^{-2s})/2 ds = (1 - e^{-y})/2 - (1 - e^{-3y})/6.
  auto layer_err = [](int ny) {
    auto gl = Grid::create({1, ny, 12.0, 0.0, 8});
    const Field uu = Field::from_function(gl, [](double, double y) { return 1.0 - std::exp(-y); });
    const Field UU = Field::from_function(gl, [](double, double y) { return std::exp(-2 * y); });
    return max_err(double_layer(uu, UU), [](double, double y) {
      return 0.5 * (1.0 - std::exp(-y)) - (1.0 - std::exp(-3 * y)) / 6.0;
    }, false);
  };
  const double e1 = layer_err(257), e2 = layer_err(513);
  CHECK(e2 < 1e-7);
  CHECK(std::log2(e1 / e2) >= 3.5);
  const Field u = Field::from_function(g, [](double, double y) { return 1.0 - std::exp(-y); });
  const Field U = Field::from_function(g, [](double, double y) { return std::exp(-2 * y); });
  const Field L = double_layer(u, U);
  Field U3 = U;
  U3 *= 3.0;
  const Field L3 = double_layer(u, U3);
  for (size_t i = 0; i < L.coeffs().size(); ++i)
    CHECK(std::abs(L3.coeffs()[i] - 3.0 * L.coeffs()[i]) <= 1e-14);
}

TEST_CASE("lambda_source: term audit for x-independent u") {
  auto g = Grid::create({2, 129, 9.0, 0.0, 8});
  const Field u = Field::from_function(g, [](double, double y) { return y * y * std::exp(-y * y / 2); });
  const Field zero(g);
  const Field lam = lambda_field(u, zero);
  const LambdaSource h = lambda_source(u, zero, lam, true);
  for (const Field* f : {&h.lambda_stretch, &h.shear_f, &h.int_lambda, &h.layer, &h.curvature,
                         &h.v_term, &h.shear_U})
    CHECK(f->max_abs_coeff() == 0.0);

  // Single mode with U = 0: only the stretch and curvature terms survive
  // among the first, fifth and sixth terms.
  const Field w = small_state(g, 1.0).u;
  const Field lw = lambda_field(w, zero);
  const LambdaSource hw = lambda_source(w, zero, lw, true);
  CHECK(hw.shear_f.max_abs_coeff() == 0.0);
  CHECK(hw.layer.max_abs_coeff() == 0.0);
  CHECK(hw.shear_U.max_abs_coeff() == 0.0);
  const Field expect_stretch = -4.0 * multiply(diff_x(w, 1), diff_x(w, 3));
  const Field expect_curv = -3.0 * multiply(diff_x(w, 2), diff_x(w, 2));
  for (size_t i = 0; i < expect_curv.coeffs().size(); ++i) {
    CHECK(std::abs(hw.lambda_stretch.coeffs()[i] - expect_stretch.coeffs()[i]) < 1e-14);
    CHECK(std::abs(hw.curvature.coeffs()[i] - expect_curv.coeffs()[i]) < 1e-14);
  }
}

TEST_CASE("residuals: zero trajectory and spacing check") {
  auto g = Grid::create({2, 65, 9.0, 0.0, 8});
  const SimState a(0.0, Field(g), Field(g)), b(0.1, Field(g), Field(g)), c(0.2, Field(g), Field(g));
  CHECK(residual_f_relation(a, b, c) == 0.0);
  CHECK(residual_U_relation(a, b, c) == 0.0);
  CHECK(residual_lambda_relation(a, b, c) == 0.0);
  const SimState d(0.35, Field(g), Field(g));
  CHECK_THROWS(residual_U_relation(a, b, d));
}

TEST_CASE("step_f: zero forcing and frozen-coefficient self-convergence") {
  auto g = Grid::create({2, 65, 9.0, 0.0, 8});
  const Integrator integ(g, 1e-2, true, true);
  const SimState z(0.0, Field(g), Field(g));
  CHECK(integ.step_f_frozen(z).max_abs_coeff() == 0.0);

  // Reference: fine solve; errors at the coarse nodes.
  auto solve_f = [](int ny, double dt) {
    auto gg = Grid::create({2, ny, 9.0, 0.0, 8});
    const Integrator it(gg, dt, true, true);
    SimState s = small_state(gg, 0.5);
    for (int n = 0; n < static_cast<int>(std::lround(0.2 / dt)); ++n) {
      s.f = it.step_f_frozen(s);
      s.t += dt;
    }
    return s.f;
  };
  const Field ref = solve_f(1025, 1.25e-4);
  std::vector<double> err;
  for (auto [ny, dt] : std::vector<std::pair<int, double>>{{65, 2e-3}, {129, 1e-3}, {257, 5e-4}}) {
    const Field f = solve_f(ny, dt);
    const int stride = 1024 / (ny - 1);
    double e = 0.0;
    for (int k = 0; k <= 2; ++k)
      for (int i = 0; i < ny; ++i) e = std::max(e, std::abs(f(k, i) - ref(k, i * stride)));
    err.push_back(e);
  }
  for (size_t i = 0; i + 1 < err.size(); ++i) CHECK(err[i] / err[i + 1] >= 4.0);
}

TEST_CASE("U relation at t = 0: one-sided slope equals d_x^4 u0") {
  std::vector<double> err;
  for (double dt : {4e-4, 2e-4, 1e-4}) {
    auto g = Grid::create({2, 257, 9.0, 0.0, 8});
    const Integrator integ(g, dt, true, true);
    const SimState s0 = small_state(g, 0.5);
    const SimState s1 = integ.step(s0);
    Field slope = derive_U(s1.f) - derive_U(s0.f);
    slope *= 1.0 / dt;
    const Field target = diff_x(s0.u, 4);
    err.push_back(l2_norm(slope - target, true) / l2_norm(target));
  }
  CHECK(err.back() < 1e-2);
  for (size_t i = 0; i + 1 < err.size(); ++i) CHECK(err[i] / err[i + 1] >= 1.5);
}

TEST_CASE("residuals converge along a run") {
  std::vector<ResidualLevel> lv;
  for (auto [ny, dt] : std::vector<std::pair<int, double>>{{65, 4e-3}, {129, 2e-3}, {257, 1e-3}})
    lv.push_back(residuals_at(residual_config(ny, dt), 0.2));
  for (size_t i = 0; i + 1 < lv.size(); ++i) {
    CHECK(lv[i].cancel_residual / lv[i + 1].cancel_residual >= 3.0);
    CHECK(std::log2(lv[i].lambda_residual / lv[i + 1].lambda_residual) >= 1.5);
  }
}

TEST_CASE("wall Neumann defect of U decreases under refinement") {
  std::vector<double> d;
  for (auto [ny, dt] : std::vector<std::pair<int, double>>{{65, 4e-3}, {129, 2e-3}, {257, 1e-3}}) {
    RunConfig cfg = residual_config(ny, dt);
    cfg.t_final = 0.2;
    cfg.output_every = 1000;
    cfg.compute_residuals = false;
    const RunResult r = run(cfg);
    d.push_back(wall_neumann_defect(derive_U(r.final_state->f)));
  }
  for (size_t i = 0; i + 1 < d.size(); ++i) CHECK(d[i + 1] < d[i]);
}
