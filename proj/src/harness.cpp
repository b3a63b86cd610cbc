#include "prandtl/harness.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "prandtl/auxiliary.hpp"
#include "prandtl/bootstrap.hpp"
#include "prandtl/config.hpp"
#include "prandtl/errors.hpp"
#include "prandtl/oracles.hpp"

namespace prandtl {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Workers

int worker_count() {
  if (const char* env = std::getenv("PRANDTL_LAB_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw ParameterError(std::string("PRANDTL_LAB_WORKERS must be a positive integer, got '") +
                           env + "'");
    return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(n, worker_count());
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::mutex mu;
  int next = 0;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      int i;
      {
        std::lock_guard lock(mu);
        if (next >= n || first_error) return;
        i = next++;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// Output

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  return os;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::string join(std::initializer_list<double> values) {
  std::string s;
  for (double v : values) {
    if (!s.empty()) s += ',';
    s += format_double(v);
  }
  return s;
}

const std::vector<std::string>& deviation_log() {
  static const std::vector<std::string> log = {
      "wall-normal derivatives use fourth-order finite differences on the actual nodes",
      "f uses a one-sided fourth-order Neumann closure at Ymax",
      "the damping term acts on f and enters the U and lambda relations",
      "only wavenumbers k >= 0 are stored; negative modes follow by conjugate symmetry",
      "products are dealiased by zero padding to Nx >= 3K+1 samples",
  };
  return log;
}

}  // namespace

void write_timeseries_csv(const fs::path& path, const std::vector<SampleRow>& rows) {
  auto os = open_for_write(path);
  os << kTimeseriesHeader << '\n';
  for (const auto& r : rows)
    os << join({r.report.t, r.report.x_norm, r.report.y_norm, r.report.z_norm, r.scaled_x_norm(),
                r.report.bootstrap_lhs, r.rhs_H, r.rhs_C, r.cancel_residual, r.lambda_residual})
       << '\n';
  if (!os) throw IoError("write failed for " + path.string());
}

void write_toy_csv(const fs::path& path, const std::vector<ToyRow>& rows) {
  auto os = open_for_write(path);
  os << kToyHeader << '\n';
  for (const auto& r : rows) os << join({r.t, r.triple_norm, r.energy, r.max_h}) << '\n';
  if (!os) throw IoError("write failed for " + path.string());
}

RunResult run_to_directory(const RunConfig& cfg, const fs::path& dir) {
  ensure_dir(dir);
  RunHooks hooks;
  if (cfg.dump_fields) {
    ensure_dir(dir / "fields");
    hooks.on_sample = [&](const SimState& s, int index) {
      std::ostringstream tag;
      tag << std::setw(5) << std::setfill('0') << index;
      write_field_dump(dir / "fields" / ("u_" + tag.str()), s.u, "u", s.t);
      write_field_dump(dir / "fields" / ("f_" + tag.str()), s.f, "f", s.t);
    };
  }
  RunResult result = run(cfg, hooks);
  write_timeseries_csv(dir / "timeseries.csv", result.rows);

  const GridPtr grid = Grid::create(cfg.grid);
  json meta = {
      {"config", to_json(cfg)},
      {"deviations", deviation_log()},
      {"Nx", grid->Nx()},
      {"initial_scale", result.initial_scale},
      {"samples", result.rows.size()},
      {"diverged", result.diverged},
  };
  if (result.diverged) {
    meta["error"] = result.error;
    meta["divergence_time"] = result.divergence_time;
  }
  write_json_file(dir / "meta.json", meta);
  return result;
}

ToyResult toy_to_directory(const ToyConfig& cfg, const fs::path& dir) {
  ensure_dir(dir);
  ToyResult result = toy_run(cfg);
  write_toy_csv(dir / "toy.csv", result.rows);
  write_json_file(dir / "meta.json",
                  {{"config", to_json(cfg)},
                   {"deviations",
                    {"homogeneous Dirichlet conditions on h and g at y = 0 and y = Ymax",
                     "strip [0, Ymax] in place of the half-line"}}});
  return result;
}

// ---------------------------------------------------------------------------
// Damping comparison

namespace {

double safe_ratio(double a, double b) {
  if (a == 0.0 && b == 0.0) return 1.0;
  return a / b;
}

}  // namespace

CompareSummary compare_damping(const RunConfig& cfg) {
  RunConfig on = cfg, off = cfg;
  on.damping = true;
  off.damping = false;
  RunResult results[2];
  parallel_for(2, [&](int i) { results[i] = run(i == 0 ? on : off); });
  const RunResult& d = results[0];
  const RunResult& u = results[1];
  if (d.diverged) throw DivergenceError("damped run failed: " + d.error, d.divergence_time);

  CompareSummary s;
  s.t_final = cfg.t_final;
  s.undamped_diverged = u.diverged;
  s.undamped_error = u.error;
  const size_t n = std::min(d.rows.size(), u.rows.size());
  for (size_t i = 0; i < n; ++i) {
    const auto& a = d.rows[i];
    const auto& b = u.rows[i];
    s.series.push_back({a.report.t, a.l2_u, b.l2_u, safe_ratio(a.l2_u, b.l2_u), a.report.x_norm,
                        b.report.x_norm, safe_ratio(a.report.x_norm, b.report.x_norm)});
  }
  if (!u.diverged && !s.series.empty()) {
    s.final_l2_ratio = s.series.back().l2_ratio;
    s.final_x_ratio = s.series.back().x_ratio;
  } else {
    s.final_l2_ratio = 0.0;
    s.final_x_ratio = 0.0;
  }
  return s;
}

void write_compare_csv(const fs::path& path, const CompareSummary& s) {
  auto os = open_for_write(path);
  os << "t,l2_damped,l2_undamped,l2_ratio,x_damped,x_undamped,x_ratio\n";
  for (const auto& r : s.series)
    os << join({r.t, r.l2_damped, r.l2_undamped, r.l2_ratio, r.x_damped, r.x_undamped, r.x_ratio})
       << '\n';
  if (!os) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Residual refinement

ResidualLevel residuals_at(const RunConfig& cfg, double t_eval) {
  cfg.validate();
  const double ratio = t_eval / cfg.dt;
  const long n_eval = std::lround(ratio);
  if (n_eval < 1 || std::abs(ratio - n_eval) > 1e-9 * ratio)
    throw ParameterError("residuals_at: t_eval must be a positive multiple of dt");
  const GridPtr grid = Grid::create(cfg.grid);
  const Integrator integ(grid, cfg.dt, cfg.damping, cfg.advection);
  SimState s = initial_state(cfg, grid);
  auto advance = [&](const SimState& st, long n) {
    SimState next = integ.step(st);
    next.t = static_cast<double>(n) * cfg.dt;
    return next;
  };
  for (long n = 1; n < n_eval; ++n) s = advance(s, n);
  const SimState prev = s;
  const SimState mid = advance(prev, n_eval);
  const SimState next = advance(mid, n_eval + 1);
  return {cfg.grid.Ny, cfg.dt, residual_U_relation(prev, mid, next),
          residual_lambda_relation(prev, mid, next)};
}

// ---------------------------------------------------------------------------
// Pinned configurations

RunConfig oracle_linear_config() {
  RunConfig c;
  c.grid = {8, 257, 9.0, 0.0, 8};
  c.dt = 1e-3;
  c.t_final = 1.0;
  c.advection = false;
  c.damping = true;
  c.initial.normalize = false;
  c.initial.components = {{1, 0.0, 1.0, Profile::GaussY2, 1}, {3, 0.5, 0.0, Profile::Sine, 2}};
  c.output_every = 100;
  c.compute_norms = false;
  c.compute_residuals = false;
  return c;
}

RunConfig mms_config(int Ny, double dt) {
  RunConfig c;
  c.grid = {4, Ny, 40.0, 0.0, 8};
  c.dt = dt;
  c.t_final = 1.0;
  c.forcing = Forcing::Manufactured;
  c.initial.normalize = false;
  c.initial.components = {{1, 0.0, 1.0, Profile::ExpY2, 1}};
  c.output_every = 1000000;
  c.compute_norms = false;
  c.compute_residuals = false;
  return c;
}

RunConfig residual_config(int Ny, double dt) {
  RunConfig c;
  c.grid = {8, Ny, 9.0, 0.0, 8};
  c.dt = dt;
  c.t_final = 0.5;
  c.initial.normalize = false;
  c.initial.components = {{1, 0.0, 0.1, Profile::GaussY2, 1}};
  c.output_every = 1;
  c.compute_norms = false;
  return c;
}

RunConfig decay_config() {
  RunConfig c;
  c.grid = {16, 257, 9.0, 0.0, 8};
  c.gevrey = GevreyParams::defaults();
  c.dt = 5e-3;
  c.t_final = 20.0;
  c.output_every = 20;
  return c;
}

ToyConfig toy_oracle_config() {
  ToyConfig c;
  c.grid = {4, 257, 6.0, 0.0, 8};
  c.dt = 1e-3;
  c.t_final = 2.0;
  c.output_every = 10;
  c.initial = {1.0, 0, 3.0, 4.0, 0.0};
  return c;
}

RunConfig compare_linear_config() {
  RunConfig c = oracle_linear_config();
  c.initial.components = {{1, 0.0, 1.0, Profile::GaussY2, 1}};
  return c;
}

RunConfig compare_nonlinear_config() {
  RunConfig c;
  c.grid = {8, 129, 9.0, 0.0, 8};
  c.dt = 1e-2;
  c.t_final = 10.0;
  c.output_every = 50;
  c.compute_residuals = false;
  return c;
}

// ---------------------------------------------------------------------------
// Suites

namespace {

struct Reporter {
  std::ostream& log;
  bool all = true;
  void line(bool ok, const std::string& name, const std::string& detail) {
    all = all && ok;
    log << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  }
};

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

double profile_of(const InitialComponent& c, double y, double L) {
  switch (c.profile) {
    case Profile::GaussY2: return y * y * std::exp(-0.5 * y * y);
    case Profile::ExpY2: return y * y * std::exp(-y);
    case Profile::Sine: return std::sin(c.n * std::numbers::pi * y / L);
  }
  return 0.0;
}

/// Largest |u - heat-series oracle| over the physical grid.
double linear_oracle_error(const RunConfig& cfg, const Field& u, double t) {
  const double L = cfg.grid.Ymax;
  const double delta = cfg.damping ? 1.0 : 0.0;
  std::vector<std::vector<double>> coeffs;
  for (const auto& c : cfg.initial.components)
    coeffs.push_back(sine_coefficients([&](double y) { return profile_of(c, y, L); }, L, 160));
  const Field exact = Field::from_function(u.grid_ptr(), [&](double x, double y) {
    double s = 0.0;
    for (size_t i = 0; i < coeffs.size(); ++i) {
      const auto& c = cfg.initial.components[i];
      s += (c.amp_cos * std::cos(c.k * x) + c.amp_sin * std::sin(c.k * x)) *
           heat_series(coeffs[i], L, delta, t, y);
    }
    return s;
  });
  const auto a = u.to_physical();
  const auto b = exact.to_physical();
  double err = 0.0;
  for (size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a[i] - b[i]));
  return err;
}

int suite_oracle_linear(const fs::path& out, Reporter& rep) {
  const RunConfig cfg = oracle_linear_config();
  RunResult r = run_to_directory(cfg, out / "oracle-linear");
  const SimState& fin = *r.final_state;
  const double err = linear_oracle_error(cfg, fin.u, fin.t);
  rep.line(err <= 1e-6, "linear-oracle", "max error " + sci(err) + " (limit 1e-6)");

  const Integrator integ(fin.u.grid_ptr(), cfg.dt, cfg.damping, cfg.advection);
  const double res = pde_residual(fin, integ.step(fin), cfg);
  rep.line(res < 1e-5, "linear-residual", "pde residual " + sci(res) + " (limit 1e-5)");

  const double l2_0 = r.rows.front().l2_u;
  double worst = -1e300;
  for (const auto& row : r.rows)
    worst = std::max(worst, row.l2_u - std::exp(-row.report.t) * l2_0);
  rep.line(worst <= 1e-8, "linear-dissipation",
           "max ||u(t)|| - e^{-t}||u0|| = " + sci(worst) + " (slack 1e-8)");
  return 0;
}

// Max-norm difference of two fields on the nodes of the coarser grid.
double nested_difference(const Field& coarse, const Field& fine) {
  const int stride = (fine.grid().Ny() - 1) / (coarse.grid().Ny() - 1);
  const auto a = coarse.to_physical();
  const auto b = fine.to_physical();
  const int nx = coarse.grid().Nx();
  if (fine.grid().Nx() != nx) throw ParameterError("nested_difference: Nx differs");
  double d = 0.0;
  for (int n = 0; n < nx; ++n)
    for (int i = 0; i < coarse.grid().Ny(); ++i)
      d = std::max(d, std::abs(a[static_cast<size_t>(n) * coarse.grid().Ny() + i] -
                               b[static_cast<size_t>(n) * fine.grid().Ny() + i * stride]));
  return d;
}

int suite_mms(const fs::path& out, Reporter& rep) {
  fs::create_directories(out / "mms");
  const std::vector<double> dts = {8e-3, 4e-3, 2e-3, 1e-3};
  const std::vector<int> nys = {65, 129, 257, 513};
  constexpr int kTimeNy = 257;
  constexpr double kSpaceDt = 1e-3;

  std::vector<double> texact(dts.size()), sexact(nys.size());
  std::mutex mu;
  std::vector<std::optional<Field>> tf(dts.size()), sf(nys.size());
  parallel_for(static_cast<int>(dts.size() + nys.size()), [&](int i) {
    const bool temporal = i < static_cast<int>(dts.size());
    const RunConfig cfg = temporal ? mms_config(kTimeNy, dts[i])
                                   : mms_config(nys[i - dts.size()], kSpaceDt);
    RunResult r = run(cfg);
    if (r.diverged) throw DivergenceError(r.error, r.divergence_time);
    const Field& u = r.final_state->u;
    const Field exact = manufactured_field(u.grid_ptr(), r.final_state->t);
    const double e = l2_norm(u - exact);
    std::lock_guard lock(mu);
    if (temporal) {
      tf[i] = u;
      texact[i] = e;
    } else {
      sf[i - dts.size()] = u;
      sexact[i - dts.size()] = e;
    }
  });

  std::vector<double> tdiff, sdiff;
  for (size_t i = 0; i + 1 < dts.size(); ++i) tdiff.push_back(nested_difference(*tf[i], *tf[i + 1]));
  for (size_t i = 0; i + 1 < nys.size(); ++i) sdiff.push_back(nested_difference(*sf[i], *sf[i + 1]));
  const auto torders = observed_orders(tdiff);
  const auto sorders = observed_orders(sdiff);

  auto os = open_for_write(out / "mms" / "mms.csv");
  os << "study,level,resolution,difference,order,error_vs_exact\n";
  for (size_t i = 0; i < dts.size(); ++i)
    os << "time," << i << ',' << format_double(dts[i]) << ','
       << format_double(i < tdiff.size() ? tdiff[i] : NAN) << ','
       << format_double(i >= 1 && i - 1 < torders.size() ? torders[i - 1] : NAN) << ','
       << format_double(texact[i]) << '\n';
  for (size_t i = 0; i < nys.size(); ++i)
    os << "space," << i << ',' << nys[i] << ',' << format_double(i < sdiff.size() ? sdiff[i] : NAN)
       << ',' << format_double(i >= 1 && i - 1 < sorders.size() ? sorders[i - 1] : NAN) << ','
       << format_double(sexact[i]) << '\n';

  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ", ") + sci(x);
    return s;
  };
  double tmin = 1e300, smin = 1e300;
  for (double o : torders) tmin = std::min(tmin, o);
  for (double o : sorders) smin = std::min(smin, o);
  rep.line(tmin >= 1.9, "mms-time-order", "observed orders " + list(torders) + " (min 1.9)");
  rep.line(smin >= 1.9, "mms-space-order", "observed orders " + list(sorders) + " (min 1.9)");
  return 0;
}

int suite_refine_residuals(const fs::path& out, Reporter& rep) {
  fs::create_directories(out / "refine-residuals");
  const std::vector<std::pair<int, double>> levels = {{65, 4e-3}, {129, 2e-3}, {257, 1e-3}};
  std::vector<ResidualLevel> res(levels.size());
  parallel_for(static_cast<int>(levels.size()), [&](int i) {
    res[i] = residuals_at(residual_config(levels[i].first, levels[i].second), 0.2);
  });
  auto os = open_for_write(out / "refine-residuals" / "residuals.csv");
  os << "Ny,dt,cancel_residual,lambda_residual\n";
  for (const auto& r : res)
    os << r.Ny << ',' << format_double(r.dt) << ',' << format_double(r.cancel_residual) << ','
       << format_double(r.lambda_residual) << '\n';
  for (size_t i = 0; i + 1 < res.size(); ++i) {
    const double fu = res[i].cancel_residual / res[i + 1].cancel_residual;
    const double fl = res[i].lambda_residual / res[i + 1].lambda_residual;
    const std::string lvl = " level " + std::to_string(i) + "->" + std::to_string(i + 1);
    rep.line(fu >= 3.0, "U-relation-refinement", "factor " + sci(fu) + lvl + " (min 3)");
    rep.line(fl >= 3.0, "lambda-relation-refinement", "factor " + sci(fl) + lvl + " (min 3)");
  }
  return 0;
}

int suite_decay(const fs::path& out, Reporter& rep) {
  const RunConfig cfg = decay_config();
  RunResult r = run_to_directory(cfg, out / "decay");
  rep.line(!r.diverged, "decay-run", r.diverged ? r.error : "completed to T = 20");
  const auto reports = r.reports();
  const DecaySummary d = decay_report(reports, cfg.gevrey);
  const MonitorResult m = monitor(reports, cfg.gevrey);
  write_json_file(out / "decay" / "decay.json",
                  {{"max_scaled_x_norm", d.max_scaled_x},
                   {"t_at_max", d.t_at_max},
                   {"bound", d.bound},
                   {"z_integral", d.z_integral},
                   {"margin", d.margin},
                   {"full_margin", d.full_margin},
                   {"passed", d.passed},
                   {"rhs_H", m.rhs_H},
                   {"rhs_C", m.rhs_C},
                   {"first_H_violation", m.first_H_violation ? json(*m.first_H_violation) : json()},
                   {"first_C_violation", m.first_C_violation ? json(*m.first_C_violation) : json()}});
  rep.line(d.margin >= 0.1, "decay-bound",
           "max e^{t/4}|a|_X = " + sci(d.max_scaled_x) + ", bound " + sci(d.bound) + ", margin " +
               sci(d.margin) + " (min 0.1)");
  rep.line(m.C_holds_throughout(), "bootstrap-C",
           m.first_C_violation ? "first violation at t = " + sci(*m.first_C_violation)
                               : "holds at all " + std::to_string(m.flags.size()) + " samples");
  return 0;
}

int suite_toy(const fs::path& out, Reporter& rep) {
  const ToyConfig cfg = toy_oracle_config();
  ToyResult r = toy_to_directory(cfg, out / "toy");
  const auto& in = cfg.initial;
  const double L = cfg.grid.Ymax;
  const auto a = sine_coefficients(
      [&](double y) { return in.amplitude * std::exp(-in.sharpness * (y - in.center) * (y - in.center)); },
      L, 400);
  const std::vector<double> b(a.size(), 0.0);
  const Field& h = r.final_state.h;
  double err = 0.0;
  for (int i = 0; i < h.grid().Ny(); ++i)
    err = std::max(err, std::abs(h(0, i).real() -
                                 wave_series(a, b, L, r.final_state.t, h.grid().y(i))));
  rep.line(err <= 1e-4, "toy-wave-oracle", "max error " + sci(err) + " (limit 1e-4)");

  const double e0 = r.rows.front().energy;
  double drift = 0.0;
  for (const auto& row : r.rows) drift = std::max(drift, std::abs(row.energy - e0) / e0);
  drift /= cfg.t_final;
  rep.line(drift <= 1e-6, "toy-energy-drift", "relative drift per unit time " + sci(drift) +
                                                  " (limit 1e-6)");
  return 0;
}

int suite_compare(const fs::path& out, Reporter& rep) {
  fs::create_directories(out / "compare");
  const CompareSummary lin = compare_damping(compare_linear_config());
  write_compare_csv(out / "compare" / "compare_linear.csv", lin);
  const double target = std::exp(-lin.t_final);
  const double dev = std::abs(lin.final_l2_ratio - target);
  rep.line(dev <= 1e-6, "damping-linear",
           "ratio " + sci(lin.final_l2_ratio) + " vs e^{-T} " + sci(target) + ", deviation " +
               sci(dev) + " (limit 1e-6)");

  const CompareSummary nl = compare_damping(compare_nonlinear_config());
  write_compare_csv(out / "compare" / "compare_nonlinear.csv", nl);
  const double lim = std::exp(-0.5 * nl.t_final);
  rep.line(nl.final_x_ratio <= lim, "damping-nonlinear",
           "X-norm ratio " + sci(nl.final_x_ratio) + (nl.undamped_diverged ? " (undamped diverged)" : "") +
               " (limit " + sci(lim) + ")");
  return 0;
}

}  // namespace

const std::vector<std::string>& suite_kinds() {
  static const std::vector<std::string> kinds = {"oracle-linear", "mms",  "refine-residuals",
                                                 "decay",         "toy", "compare"};
  return kinds;
}

int run_suite(const std::string& kind, const fs::path& out, std::ostream& log) {
  ensure_dir(out);
  Reporter rep{log};
  if (kind == "oracle-linear")
    suite_oracle_linear(out, rep);
  else if (kind == "mms")
    suite_mms(out, rep);
  else if (kind == "refine-residuals")
    suite_refine_residuals(out, rep);
  else if (kind == "decay")
    suite_decay(out, rep);
  else if (kind == "toy")
    suite_toy(out, rep);
  else if (kind == "compare")
    suite_compare(out, rep);
  else
    throw ParameterError("unknown suite kind '" + kind + "'");
  return rep.all ? 0 : 1;
}

}  // namespace prandtl
