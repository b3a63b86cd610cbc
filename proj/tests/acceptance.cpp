// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any
// failure. Reference values are computed here, not taken from the library.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "prandtl/bootstrap.hpp"
#include "prandtl/gevrey.hpp"
#include "prandtl/harness.hpp"
#include "prandtl/solver.hpp"
#include "prandtl/toy.hpp"
#include "test_oracles.hpp"

using namespace prandtl;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void report(bool ok, const std::string& name, const std::string& detail) {
  if (!ok) ++failures;
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
}

/// Runs body, appending wall time to the detail and failing on a time limit.
void criterion(const std::string& name, double limit_s,
               const std::function<bool(std::string&)>& body) {
  const auto t0 = Clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail += std::string("exception: ") + e.what();
    ok = false;
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_time = secs < limit_s;
  detail += "; " + sci(secs) + " s (limit " + sci(limit_s) + " s)";
  report(ok && in_time, name, detail);
}

double profile(const InitialComponent& c, double y, double L) {
  switch (c.profile) {
    case Profile::GaussY2: return y * y * std::exp(-0.5 * y * y);
    case Profile::ExpY2: return y * y * std::exp(-y);
    case Profile::Sine: return std::sin(c.n * std::numbers::pi * y / L);
  }
  return 0.0;
}

double max_nested_diff(const Field& coarse, const Field& fine) {
  const int cy = coarse.grid().Ny(), fy = fine.grid().Ny();
  const int stride = (fy - 1) / (cy - 1);
  const auto a = coarse.to_physical();
  const auto b = fine.to_physical();
  double d = 0.0;
  for (int n = 0; n < coarse.grid().Nx(); ++n)
    for (int i = 0; i < cy; ++i)
      d = std::max(d, std::abs(a[static_cast<size_t>(n) * cy + i] -
                               b[static_cast<size_t>(n) * fy + i * stride]));
  return d;
}

std::vector<double> orders(const std::vector<double>& diffs) {
  std::vector<double> o;
  for (size_t i = 0; i + 1 < diffs.size(); ++i) o.push_back(std::log2(diffs[i] / diffs[i + 1]));
  return o;
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + sci(x);
  return s;
}

bool linear_oracle(std::string& d) {
  const RunConfig cfg = oracle_linear_config();
  const RunResult r = run(cfg);
  if (r.diverged) {
    d = r.error;
    return false;
  }
  const Field& u = r.final_state->u;
  const double T = r.final_state->t;
  const double L = cfg.grid.Ymax;
  std::vector<std::vector<double>> coeffs;
  for (const auto& c : cfg.initial.components)
    coeffs.push_back(testref::sine_coeffs([&](double y) { return profile(c, y, L); }, L, 160));
  const auto phys = u.to_physical();
  const Grid& g = u.grid();
  double err = 0.0;
  for (int n = 0; n < g.Nx(); ++n)
    for (int i = 0; i < g.Ny(); ++i) {
      double exact = 0.0;
      for (size_t c = 0; c < coeffs.size(); ++c) {
        const auto& comp = cfg.initial.components[c];
        exact += (comp.amp_cos * std::cos(comp.k * g.x(n)) + comp.amp_sin * std::sin(comp.k * g.x(n))) *
                 testref::heat(coeffs[c], L, 1.0, T, g.y(i));
      }
      err = std::max(err, std::abs(phys[static_cast<size_t>(n) * g.Ny() + i] - exact));
    }
  d = "max error " + sci(err) + " at T = " + sci(T) + " (limit 1e-6)";
  return err <= 1e-6 && std::abs(T - 1.0) < 1e-12;
}

bool mms(std::string& d) {
  const std::vector<double> dts = {8e-3, 4e-3, 2e-3, 1e-3};
  const std::vector<int> nys = {65, 129, 257, 513};
  std::vector<std::optional<Field>> tf(dts.size()), sf(nys.size());
  std::vector<double> texact(dts.size()), sexact(nys.size());
  parallel_for(static_cast<int>(dts.size() + nys.size()), [&](int i) {
    const bool temporal = i < static_cast<int>(dts.size());
    const int j = temporal ? i : i - static_cast<int>(dts.size());
    const RunConfig cfg = temporal ? mms_config(257, dts[j]) : mms_config(nys[j], 1e-3);
    const RunResult r = run(cfg);
    if (r.diverged) throw std::runtime_error("mms run diverged: " + r.error);
    const Field& u = r.final_state->u;
    const double t = r.final_state->t;
    const Field exact = Field::from_function(
        u.grid_ptr(), [t](double x, double y) { return std::exp(-t) * std::sin(x) * y * y * std::exp(-y); });
    const auto a = u.to_physical(), b = exact.to_physical();
    double e = 0.0;
    for (size_t k = 0; k < a.size(); ++k) e = std::max(e, std::abs(a[k] - b[k]));
    (temporal ? tf : sf)[j] = u;
    (temporal ? texact : sexact)[j] = e;
  });
  std::vector<double> td, sd;
  for (size_t i = 0; i + 1 < dts.size(); ++i) td.push_back(max_nested_diff(*tf[i], *tf[i + 1]));
  for (size_t i = 0; i + 1 < nys.size(); ++i) sd.push_back(max_nested_diff(*sf[i], *sf[i + 1]));
  const auto to = orders(td), so = orders(sd);
  const double tmin = *std::min_element(to.begin(), to.end());
  const double smin = *std::min_element(so.begin(), so.end());
  d = "time orders " + list(to) + ", space orders " + list(so) + " (min 1.9); errors vs exact: time " +
      list(texact) + ", space " + list(sexact);
  return tmin >= 1.9 && smin >= 1.9;
}

bool norm_oracle(std::string& d) {
  auto g = Grid::create({4, 65, 9.0, 0.0, 8});
  std::mt19937_64 rng(2024);
  const GevreyParams p = GevreyParams::defaults();
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Field h = testref::random_field(g, rng);
    const double r = trial % 2 ? 1.0 : 0.5;
    const double brute = testref::brute_norm_X_sq(h, r, p, 30);
    const double lib = norm_X_squared(h, r, p);
    worst = std::max(worst, std::abs(lib - brute) / brute);
  }
  d = "20 trials, max relative difference " + sci(worst) + " (limit 1e-10)";
  return worst <= 1e-10;
}

bool radius(std::string& d) {
  const double rho0 = 0.5;
  double worst_eq = 0.0;
  bool bounds = true;
  for (int i = 0; i < 1000; ++i) {
    const double t = 240.0 * i / 999.0;
    const auto s = radius_rho(t, rho0);
    const double e = std::exp(-t / 12.0);
    const double rho = 0.5 * rho0 * (1.0 + e);
    const double closed = rho0 * e / (288.0 * (1.0 + e));
    bounds = bounds && s.rho >= rho0 / 2 && s.rho <= rho0 && s.drho <= std::pow(s.drho, 3) &&
             std::pow(s.drho, 3) < 0.0 && std::abs(s.rho - rho) <= 1e-15 * rho;
    worst_eq = std::max(worst_eq, std::abs((s.d2rho - s.drho * s.drho / s.rho) - closed) / closed);
  }
  // Richardson-extrapolated central differences of L_{rho(t),m}.
  auto L = [&](double t, int m) {
    return testref::coeff_L_direct(0.5 * rho0 * (1.0 + std::exp(-t / 12.0)), m);
  };
  const double h = 0.01;
  double worst_fd = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double t = 120.0 * i / 999.0;
    const auto s = radius_rho(t, rho0);
    for (int m = 0; m <= 40; ++m) {
      auto cd = [&](double hh) { return (L(t + hh, m) - L(t - hh, m)) / (2.0 * hh); };
      const double fd = (4.0 * cd(h / 2) - cd(h)) / 3.0;
      const double formula = s.drho * (m + 1) / s.rho * coeff_L(s.rho, m);
      worst_fd = std::max(worst_fd, std::abs(fd - formula) / std::abs(formula));
    }
  }
  d = std::string("bounds ") + (bounds ? "hold" : "violated") + " at 1000 times in [0,240]; " +
      "curvature identity rel. error " + sci(worst_eq) + " (limit 1e-12); dL/dt rel. error " +
      sci(worst_fd) + " on [0,120], m <= 40 (limit 1e-6)";
  return bounds && worst_eq <= 1e-12 && worst_fd <= 1e-6;
}

bool young(std::string& d) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::uniform_int_distribution<int> len(1, 80);
  int dis_viol = 0, conv_viol = 0, lib_mismatch = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> p(len(rng)), q(len(rng)), r(len(rng));
    for (auto* v : {&p, &q, &r})
      for (double& x : *v) x = (t % 3 == 0 ? std::pow(U(rng), 6) : U(rng));
    const size_t M = p.size() + q.size();
    double sp = 0.0, q2 = 0.0, r2 = 0.0, dis = 0.0, conv = 0.0;
    for (double x : p) sp += x;
    for (double x : q) q2 += x * x;
    for (double x : r) r2 += x * x;
    for (size_t m = 0; m < M; ++m) {
      double c = 0.0;
      for (size_t j = 0; j <= m && j < p.size(); ++j)
        if (m - j < q.size()) c += p[j] * q[m - j];
      dis += c * c;
      if (m < r.size()) conv += c * r[m];
    }
    const double tol = 1e-13;
    if (std::sqrt(dis) > std::sqrt(q2) * sp * (1 + tol)) ++dis_viol;
    if (conv > std::sqrt(q2 * r2) * sp * (1 + tol)) ++conv_viol;
    const auto lib = young_convolution(p, q, r);
    if (std::abs(lib.lhs - conv) > 1e-12 * std::max(conv, 1e-300) || lib.lhs > lib.rhs)
      ++lib_mismatch;
  }
  d = "1000 triples: " + std::to_string(dis_viol) + " violations of the l2 form, " +
      std::to_string(conv_viol) + " of the convolution form, " + std::to_string(lib_mismatch) +
      " library disagreements";
  return dis_viol == 0 && conv_viol == 0 && lib_mismatch == 0;
}

bool decay(std::string& d) {
  const RunConfig cfg = decay_config();
  const RunResult r = run(cfg);
  if (r.diverged) {
    d = r.error;
    return false;
  }
  const GevreyParams& p = cfg.gevrey;
  const double bound = 12.0 * p.eps0;
  const double rhs_C = (1.0 + p.rho0 * p.rho0) / (p.rho0 * p.rho0) * p.eps0 * p.eps0;
  double max_scaled = 0.0, integral = 0.0, prev_t = 0.0, prev_f = 0.0;
  int c_viol = 0;
  for (size_t i = 0; i < r.rows.size(); ++i) {
    const auto& rep = r.rows[i].report;
    max_scaled = std::max(max_scaled, std::exp(rep.t / 4.0) * rep.x_norm);
    const double f = std::exp(rep.t / 2.0) * rep.z_norm * rep.z_norm;
    if (i > 0) integral += 0.5 * (rep.t - prev_t) * (f + prev_f);
    prev_t = rep.t;
    prev_f = f;
    const double lhs = std::exp(rep.t / 2.0) * rep.x_norm * rep.x_norm + 0.25 * integral;
    if (lhs > rhs_C) ++c_viol;
  }
  const double margin = 1.0 - max_scaled / bound;
  const bool reached = std::abs(r.rows.back().report.t - 20.0) < 1e-9;
  d = "max e^{t/4}|a|_X = " + sci(max_scaled) + " vs 12 eps0 = " + sci(bound) + ", margin " +
      sci(margin) + " (min 0.1); C violated at " + std::to_string(c_viol) + " of " +
      std::to_string(r.rows.size()) + " samples";
  return reached && margin >= 0.1 && c_viol == 0;
}

bool residuals(std::string& d) {
  const std::vector<std::pair<int, double>> levels = {{65, 4e-3}, {129, 2e-3}, {257, 1e-3}};
  std::vector<ResidualLevel> res(levels.size());
  parallel_for(3, [&](int i) {
    res[i] = residuals_at(residual_config(levels[i].first, levels[i].second), 0.2);
  });
  bool ok = true;
  for (size_t i = 0; i + 1 < res.size(); ++i) {
    const double fu = res[i].cancel_residual / res[i + 1].cancel_residual;
    const double fl = res[i].lambda_residual / res[i + 1].lambda_residual;
    d += "U factor " + sci(fu) + ", lambda factor " + sci(fl) + "; ";
    ok = ok && fu >= 3.0 && fl >= 3.0;
  }
  d += "min 3";
  return ok;
}

bool damping(std::string& d) {
  const CompareSummary lin = compare_damping(compare_linear_config());
  const double target = std::exp(-lin.t_final);
  const double dev = std::abs(lin.final_l2_ratio - target);
  const CompareSummary nl = compare_damping(compare_nonlinear_config());
  const double lim = std::exp(-5.0);
  d = "linear ratio " + sci(lin.final_l2_ratio) + " vs e^{-T} deviation " + sci(dev) +
      " (limit 1e-6); nonlinear T = " + sci(nl.t_final) + " L2 ratio " + sci(nl.final_l2_ratio) +
      ", X ratio " + sci(nl.final_x_ratio) + " (limit e^{-5})";
  return dev <= 1e-6 && std::abs(nl.t_final - 10.0) < 1e-12 && !nl.undamped_diverged &&
         nl.final_l2_ratio <= lim && nl.final_x_ratio <= lim;
}

bool toy(std::string& d) {
  const ToyConfig cfg = toy_oracle_config();
  const ToyResult r = toy_run(cfg);
  const auto& in = cfg.initial;
  const double L = cfg.grid.Ymax;
  const auto a = testref::sine_coeffs(
      [&](double y) { return in.amplitude * std::exp(-in.sharpness * (y - in.center) * (y - in.center)); },
      L, 300);
  const Field& h = r.final_state.h;
  double err = 0.0;
  for (int i = 0; i < h.grid().Ny(); ++i)
    err = std::max(err, std::abs(h(0, i).real() - testref::wave(a, L, r.final_state.t, h.grid().y(i))));
  const double e0 = r.rows.front().energy;
  double drift = 0.0;
  for (const auto& row : r.rows) drift = std::max(drift, std::abs(row.energy - e0) / e0);
  drift /= cfg.t_final;
  d = "wave error " + sci(err) + " at T = " + sci(r.final_state.t) + " (limit 1e-4); energy drift " +
      sci(drift) + " per unit time at dt = " + sci(cfg.dt) + " (limit 1e-6)";
  return err <= 1e-4 && drift <= 1e-6 && std::abs(r.final_state.t - 2.0) < 1e-12;
}

}  // namespace

int main() {
  criterion("linear-oracle", 30.0, linear_oracle);
  criterion("mms-convergence", 300.0, mms);
  criterion("norm-oracle", 60.0, norm_oracle);
  criterion("radius-schedule", 60.0, radius);
  criterion("discrete-young", 60.0, young);
  criterion("decay-bound", 900.0, decay);
  criterion("cancellation-residuals", 600.0, residuals);
  criterion("damping-comparison", 600.0, damping);
  criterion("toy-oracle", 120.0, toy);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
