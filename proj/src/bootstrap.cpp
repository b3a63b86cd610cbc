#include "prandtl/bootstrap.hpp"

#include <cmath>

#include "prandtl/errors.hpp"

namespace prandtl {

BootstrapMonitor::BootstrapMonitor(const GevreyParams& p) {
  const double r2 = p.rho0 * p.rho0;
  rhs_C_ = (1.0 + r2) / r2 * p.eps0 * p.eps0;
  rhs_H_ = 2.0 * rhs_C_;
}

void BootstrapMonitor::add(double t, double x_norm, double z_norm) {
  const double integrand = std::exp(0.5 * t) * z_norm * z_norm;
  if (samples_ > 0) {
    if (t < last_t_) throw ParameterError("bootstrap monitor: time went backwards");
    integral_ += 0.5 * (t - last_t_) * (integrand + last_integrand_);
  }
  last_t_ = t;
  last_integrand_ = integrand;
  ++samples_;
  lhs_ = std::exp(0.5 * t) * x_norm * x_norm + 0.25 * integral_;
}

MonitorResult monitor(std::span<const NormReport> reports, const GevreyParams& p) {
  BootstrapMonitor m(p);
  MonitorResult out;
  out.rhs_H = m.rhs_H();
  out.rhs_C = m.rhs_C();
  for (const auto& r : reports) {
    m.add(r.t, r.x_norm, r.z_norm);
    out.flags.push_back({r.t, m.lhs(), m.H_holds(), m.C_holds()});
    if (!m.H_holds() && !out.first_H_violation) out.first_H_violation = r.t;
    if (!m.C_holds() && !out.first_C_violation) out.first_C_violation = r.t;
  }
  return out;
}

DecaySummary decay_report(std::span<const NormReport> reports, const GevreyParams& p) {
  DecaySummary s;
  s.bound = 4.0 * (p.rho0 + 1.0) / p.rho0 * p.eps0;
  double integral = 0.0;
  for (size_t n = 0; n < reports.size(); ++n) {
    const auto& r = reports[n];
    const double scaled = std::exp(0.25 * r.t) * r.x_norm;
    if (scaled > s.max_scaled_x) {
      s.max_scaled_x = scaled;
      s.t_at_max = r.t;
    }
    if (n > 0) {
      const auto& q = reports[n - 1];
      integral += 0.5 * (r.t - q.t) *
                  (std::exp(0.5 * r.t) * r.z_norm * r.z_norm +
                   std::exp(0.5 * q.t) * q.z_norm * q.z_norm);
    }
  }
  s.z_integral = std::sqrt(integral);
  s.margin = 1.0 - s.max_scaled_x / s.bound;
  s.full_margin = 1.0 - (s.max_scaled_x + s.z_integral) / s.bound;
  s.passed = s.max_scaled_x + s.z_integral <= s.bound;
  return s;
}

}  // namespace prandtl
