#pragma once

// Trajectory monitor for the continuous-induction statements
//
//   lhs(t) = e^{t/2} |a(t)|_X^2 + 1/4 int_0^t e^{s/2} |a(s)|_Z^2 ds
//   H(t):  lhs <= 2 (1 + rho0^2) / rho0^2 * eps0^2
//   C(t):  lhs <=     (1 + rho0^2) / rho0^2 * eps0^2
//
// This is monitoring of computed data, not a proof device: the time
// integral is a trapezoid over the output samples.

#include <optional>
#include <span>
#include <vector>

#include "prandtl/gevrey.hpp"

namespace prandtl {

class BootstrapMonitor {
 public:
  explicit BootstrapMonitor(const GevreyParams& p);

  /// Samples must arrive with nondecreasing t.
  void add(double t, double x_norm, double z_norm);

  double lhs() const { return lhs_; }
  double z_integral() const { return integral_; }
  double rhs_H() const { return rhs_H_; }
  double rhs_C() const { return rhs_C_; }
  bool H_holds() const { return lhs_ <= rhs_H_; }
  bool C_holds() const { return lhs_ <= rhs_C_; }
  int samples() const { return samples_; }

 private:
  double rhs_H_, rhs_C_;
  double integral_ = 0.0;
  double lhs_ = 0.0;
  double last_t_ = 0.0;
  double last_integrand_ = 0.0;
  int samples_ = 0;
};

struct MonitorFlag {
  double t;
  double lhs;
  bool H_holds;
  bool C_holds;
};

struct MonitorResult {
  std::vector<MonitorFlag> flags;
  double rhs_H = 0.0;
  double rhs_C = 0.0;
  std::optional<double> first_H_violation;
  std::optional<double> first_C_violation;
  bool C_holds_throughout() const { return !first_C_violation.has_value(); }
};

MonitorResult monitor(std::span<const NormReport> reports, const GevreyParams& p);

struct DecaySummary {
  double max_scaled_x = 0.0;  // max_t e^{t/4} |a|_X
  double t_at_max = 0.0;
  double bound = 0.0;         // 4 (rho0 + 1) / rho0 * eps0
  double z_integral = 0.0;    // (int e^{t/2} |a|_Z^2 dt)^{1/2}
  double margin = 0.0;        // 1 - max_scaled_x / bound
  double full_margin = 0.0;   // 1 - (max_scaled_x + z_integral) / bound
  bool passed = false;        // max_scaled_x + z_integral <= bound
};

DecaySummary decay_report(std::span<const NormReport> reports, const GevreyParams& p);

}  // namespace prandtl
