#include "prandtl/solver.hpp"

#include <cmath>
#include <limits>

#include "prandtl/auxiliary.hpp"
#include "prandtl/errors.hpp"

namespace prandtl {

Field normal_velocity(const Field& u) {
  Field v = integrate_y_from_0(diff_x(u, 1));
  v *= -1.0;
  return v;
}

// ---------------------------------------------------------------------------
// Configuration

void RunConfig::validate() const {
  if (grid.K < 1) throw ParameterError("run: grid.K must be >= 1");
  gevrey.validate();
  if (!(dt > 0.0)) throw ParameterError("run: dt must be > 0");
  if (!(t_final >= 0.0)) throw ParameterError("run: t_final must be >= 0");
  if (output_every < 1) throw ParameterError("run: output_every must be >= 1");
  if (scheme != "imex-cn-heun")
    throw ParameterError("run: unknown scheme '" + scheme + "' (supported: imex-cn-heun)");
  for (const auto& c : initial.components) {
    if (c.k < 0 || c.k > grid.K)
      throw ParameterError("run: initial component wavenumber " + std::to_string(c.k) +
                           " outside [0, K]");
    if (c.profile == Profile::Sine && c.n < 1)
      throw ParameterError("run: sine profile index must be >= 1");
  }
  steps();
}

long RunConfig::steps() const {
  const double n = t_final / dt;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-9 * std::max(1.0, n))
    throw ParameterError("run: t_final must be an integer multiple of dt");
  return static_cast<long>(r);
}

// ---------------------------------------------------------------------------
// Manufactured solution

double manufactured_solution(double t, double x, double y) {
  return std::exp(-t) * std::sin(x) * y * y * std::exp(-y);
}

double manufactured_source(double t, double x, double y, bool damping, bool advection) {
  const double ey = std::exp(-y);
  const double g = y * y * ey;
  const double g1 = (2.0 * y - y * y) * ey;
  const double g2 = (2.0 - 4.0 * y + y * y) * ey;
  const double G = 2.0 - ey * (y * y + 2.0 * y + 2.0);
  const double sx = std::sin(x);
  double s = std::exp(-t) * sx * (-g - g2 + (damping ? g : 0.0));
  if (advection) s += std::exp(-2.0 * t) * sx * std::cos(x) * (g * g - G * g1);
  return s;
}

Field manufactured_field(const GridPtr& grid, double t) {
  return Field::from_function(grid, [t](double x, double y) {
    return manufactured_solution(t, x, y);
  });
}

// ---------------------------------------------------------------------------
// Initial data

namespace {

double profile_value(const InitialComponent& c, double y, double ymax) {
  switch (c.profile) {
    case Profile::GaussY2: return y * y * std::exp(-0.5 * y * y);
    case Profile::ExpY2: return y * y * std::exp(-y);
    case Profile::Sine: return std::sin(c.n * std::numbers::pi * y / ymax);
  }
  return 0.0;
}

Field raw_initial(const RunConfig& cfg, const GridPtr& grid) {
  const double ymax = grid->Ymax();
  Field u = Field::from_function(grid, [&](double x, double y) {
    double s = 0.0;
    for (const auto& c : cfg.initial.components)
      s += (c.amp_cos * std::cos(c.k * x) + c.amp_sin * std::sin(c.k * x)) *
           profile_value(c, y, ymax);
    return s;
  });
  for (int k = 0; k <= grid->K(); ++k) {
    u(k, 0) = 0.0;
    u(k, grid->Ny() - 1) = 0.0;
  }
  return u;
}

}  // namespace

double initial_scale(const RunConfig& cfg, const GridPtr& grid) {
  if (!cfg.initial.normalize) return 1.0;
  const double n = norm_X(raw_initial(cfg, grid), 2.0 * cfg.gevrey.rho0, cfg.gevrey);
  return n > 0.0 ? cfg.gevrey.eps0 / n : 1.0;
}

SimState initial_state(const RunConfig& cfg, const GridPtr& grid) {
  Field u = raw_initial(cfg, grid);
  u *= initial_scale(cfg, grid);
  std::shared_ptr<const SourceFn> forcing;
  if (cfg.forcing == Forcing::Manufactured) {
    const bool damping = cfg.damping;
    const bool advection = cfg.advection;
    forcing = std::make_shared<const SourceFn>([damping, advection](double t, double x, double y) {
      return manufactured_source(t, x, y, damping, advection);
    });
  }
  return SimState(0.0, std::move(u), Field(grid), cfg.damping, std::move(forcing));
}

// ---------------------------------------------------------------------------
// Integrator

namespace {

constexpr int kBand = 4;

BandedLU build_operator(const Grid& g, double theta, double delta, bool neumann_top) {
  const int n = g.Ny();
  BandedLU a(n, kBand, kBand);
  a.set(0, 0, 1.0);
  for (int i = 1; i < n - 1; ++i) {
    const Stencil& s = g.stencil(2, i);
    for (size_t c = 0; c < s.weights.size(); ++c) {
      const int col = s.first + static_cast<int>(c);
      double v = -theta * s.weights[c];
      if (col == i) v += 1.0 + theta * delta;
      a.set(i, col, v);
    }
  }
  if (neumann_top) {
    const Stencil& s = g.stencil(1, n - 1);
    for (size_t c = 0; c < s.weights.size(); ++c)
      a.set(n - 1, s.first + static_cast<int>(c), s.weights[c]);
  } else {
    a.set(n - 1, n - 1, 1.0);
  }
  a.factorize();
  return a;
}

Field sample_source(const GridPtr& grid, const SourceFn& fn, double t) {
  return Field::from_function(grid, [&](double x, double y) { return fn(t, x, y); });
}

}  // namespace

Integrator::Integrator(GridPtr grid, double dt, bool damping, bool advection)
    : grid_(std::move(grid)), dt_(dt), damping_(damping), advection_(advection),
      dirichlet_(build_operator(*grid_, 0.5 * dt, damping ? 1.0 : 0.0, false)),
      neumann_(build_operator(*grid_, 0.5 * dt, damping ? 1.0 : 0.0, true)) {
  if (!(dt > 0.0)) throw ParameterError("integrator: dt must be > 0");
}

Field Integrator::apply_L(const Field& g) const {
  Field out = diff_y(g, 2);
  if (damping_) out -= g;
  const int last = grid_->Ny() - 1;
  for (int k = 0; k <= grid_->K(); ++k) {
    out(k, 0) = 0.0;
    out(k, last) = 0.0;
  }
  return out;
}

Field Integrator::solve(const Field& rhs, bool neumann_top) const {
  const int n = grid_->Ny();
  const int m = grid_->modes();
  std::vector<double> cols(static_cast<size_t>(n) * 2 * m);
  for (int k = 0; k < m; ++k) {
    auto src = rhs.mode(k);
    double* re = cols.data() + static_cast<size_t>(2 * k) * n;
    double* im = re + n;
    for (int i = 0; i < n; ++i) {
      re[i] = src[i].real();
      im[i] = src[i].imag();
    }
    re[0] = im[0] = 0.0;
    re[n - 1] = im[n - 1] = 0.0;
  }
  (neumann_top ? neumann_ : dirichlet_).solve(cols, 2 * m);
  Field out(grid_);
  for (int k = 0; k < m; ++k) {
    auto dst = out.mode(k);
    const double* re = cols.data() + static_cast<size_t>(2 * k) * n;
    const double* im = re + n;
    for (int i = 0; i < n; ++i) dst[i] = cplx(re[i], k == 0 ? 0.0 : im[i]);
  }
  return out;
}

void Integrator::check_cfl(const Field& u, double t) const {
  const double umax = max_abs(u);
  if (!std::isfinite(umax))
    throw DivergenceError("non-finite velocity at t = " + std::to_string(t), t);
  const double c = dt_ * grid_->K() * umax;
  if (c > 0.5)
    throw StepSizeError("CFL violated at t = " + std::to_string(t) + ": dt*K*max|u| = " +
                        std::to_string(c) + " > 0.5");
}

Integrator::Tendency Integrator::explicit_terms(const Field& u, const Field& f, double t,
                                                const SourceFn* forcing) const {
  Tendency out{Field(grid_), f_forcing(u)};
  if (advection_) {
    const Field v = normal_velocity(u);
    out.nu -= multiply(u, diff_x(u, 1));
    out.nu -= multiply(v, diff_y(u, 1));
    out.nf -= multiply(u, diff_x(f, 1));
    out.nf -= multiply(v, diff_y(f, 1));
  }
  if (forcing) out.nu += sample_source(grid_, *forcing, t);
  return out;
}

SimState Integrator::step(const SimState& s) const {
  if (s.damping != damping_)
    throw ParameterError("integrator: state damping flag differs from the integrator's");
  check_cfl(s.u, s.t);
  const SourceFn* forcing = s.forcing.get();
  const double t1 = s.t + dt_;

  Field base_u = s.u;
  base_u.axpy(0.5 * dt_, apply_L(s.u));
  Field base_f = s.f;
  base_f.axpy(0.5 * dt_, apply_L(s.f));

  const Tendency n0 = explicit_terms(s.u, s.f, s.t, forcing);
  Field pu = base_u;
  pu.axpy(dt_, n0.nu);
  Field pf = base_f;
  pf.axpy(dt_, n0.nf);
  const Field u_star = solve(pu, false);
  const Field f_star = solve(pf, true);

  const Tendency n1 = explicit_terms(u_star, f_star, t1, forcing);
  Field cu = std::move(base_u);
  cu.axpy(0.5 * dt_, n0.nu);
  cu.axpy(0.5 * dt_, n1.nu);
  Field cf = std::move(base_f);
  cf.axpy(0.5 * dt_, n0.nf);
  cf.axpy(0.5 * dt_, n1.nf);

  SimState next(t1, solve(cu, false), solve(cf, true), s.damping, s.forcing);
  if (!next.u.all_finite() || !next.f.all_finite())
    throw DivergenceError("non-finite values at t = " + std::to_string(t1), t1);
  return next;
}

Field Integrator::step_f_frozen(const SimState& s) const {
  const Field nf0 = explicit_terms(s.u, s.f, s.t, nullptr).nf;
  Field base = s.f;
  base.axpy(0.5 * dt_, apply_L(s.f));
  Field p = base;
  p.axpy(dt_, nf0);
  const Field f_star = solve(p, true);
  const Field nf1 = explicit_terms(s.u, f_star, s.t + dt_, nullptr).nf;
  base.axpy(0.5 * dt_, nf0);
  base.axpy(0.5 * dt_, nf1);
  return solve(base, true);
}

// ---------------------------------------------------------------------------
// Residual

double pde_residual(const SimState& before, const SimState& after, const RunConfig& cfg) {
  const double h = after.t - before.t;
  if (!(h > 0.0)) throw ParameterError("pde_residual: states must advance in time");
  const double tm = 0.5 * (before.t + after.t);
  Field um = before.u + after.u;
  um *= 0.5;

  Field r = after.u - before.u;
  r *= 1.0 / h;
  if (cfg.advection) {
    r += multiply(um, diff_x(um, 1));
    r += multiply(normal_velocity(um), diff_y(um, 1));
  }
  r -= diff_y(um, 2);
  if (cfg.damping) r += um;
  if (before.forcing) r -= sample_source(um.grid_ptr(), *before.forcing, tm);
  return l2_norm(r, true);
}

// ---------------------------------------------------------------------------
// Driver

double SampleRow::scaled_x_norm() const { return std::exp(0.25 * report.t) * report.x_norm; }

std::vector<NormReport> RunResult::reports() const {
  std::vector<NormReport> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.report);
  return out;
}

RunResult run(const RunConfig& cfg, const RunHooks& hooks) {
  cfg.validate();
  const GridPtr grid = Grid::create(cfg.grid);
  const long nsteps = cfg.steps();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  RunResult result;
  result.initial_scale = initial_scale(cfg, grid);
  SimState state = initial_state(cfg, grid);
  const Integrator integ(grid, cfg.dt, cfg.damping, cfg.advection);
  BootstrapMonitor monitor(cfg.gevrey);

  // Last two samples, for the centered residual window.
  std::vector<SimState> window;

  auto record = [&](const SimState& s) {
    SampleRow row;
    if (cfg.compute_norms) {
      row.report = norms_XYZ(s, cfg.gevrey);
    } else {
      row.report.rho = radius_rho(s.t, cfg.gevrey.rho0).rho;
    }
    row.report.t = s.t;
    monitor.add(s.t, row.report.x_norm, row.report.z_norm);
    row.report.bootstrap_lhs = monitor.lhs();
    row.l2_u = l2_norm(s.u);
    row.rhs_H = monitor.rhs_H();
    row.rhs_C = monitor.rhs_C();
    row.cancel_residual = nan;
    row.lambda_residual = nan;

    if (cfg.compute_residuals && window.size() == 2) {
      const SimState& prev = window[0];
      const SimState& mid = window[1];
      const double h1 = mid.t - prev.t;
      const double h2 = s.t - mid.t;
      if (std::abs(h1 - h2) <= 1e-9 * std::max(h1, h2)) {
        auto& mid_row = result.rows.back();
        mid_row.cancel_residual = residual_U_relation(prev, mid, s);
        mid_row.lambda_residual = residual_lambda_relation(prev, mid, s);
      }
    }
    if (hooks.on_sample) hooks.on_sample(s, static_cast<int>(result.rows.size()));
    if (hooks.keep_states) result.states.push_back(s);
    result.rows.push_back(std::move(row));
    if (window.size() == 2) window.erase(window.begin());
    window.push_back(s);
  };

  record(state);
  try {
    for (long n = 1; n <= nsteps; ++n) {
      state = integ.step(state);
      state.t = static_cast<double>(n) * cfg.dt;
      if (n % cfg.output_every == 0 || n == nsteps) record(state);
    }
  } catch (const DivergenceError& e) {
    result.diverged = true;
    result.divergence_time = e.time();
    result.error = e.what();
  } catch (const StepSizeError& e) {
    result.diverged = true;
    result.divergence_time = state.t;
    result.error = e.what();
  }
  result.final_state = state;
  return result;
}

}  // namespace prandtl
