#pragma once

// Experiment orchestration: output writers, paired damping runs and the
// pinned acceptance suites behind the `suite` verb.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "prandtl/solver.hpp"
#include "prandtl/toy.hpp"

namespace prandtl {

/// Worker cap from PRANDTL_LAB_WORKERS, else the hardware concurrency.
int worker_count();
/// Runs fn(0..n-1) on at most worker_count() threads; rethrows the first
/// exception.
void parallel_for(int n, const std::function<void(int)>& fn);

/// Shortest decimal that round-trips; "nan"/"inf" for non-finite values.
std::string format_double(double v);

inline constexpr const char* kTimeseriesHeader =
    "t,x_norm,y_norm,z_norm,scaled_x_norm,bootstrap_lhs,rhs_H,rhs_C,cancel_residual,"
    "lambda_residual";
inline constexpr const char* kToyHeader = "t,triple_norm,energy,max_h";

void write_timeseries_csv(const std::filesystem::path& path, const std::vector<SampleRow>& rows);
void write_toy_csv(const std::filesystem::path& path, const std::vector<ToyRow>& rows);

/// Runs cfg and writes timeseries.csv, meta.json and (if enabled) field
/// dumps under dir. The CSV is written even when the run diverges.
RunResult run_to_directory(const RunConfig& cfg, const std::filesystem::path& dir);
ToyResult toy_to_directory(const ToyConfig& cfg, const std::filesystem::path& dir);

struct CompareRow {
  double t;
  double l2_damped, l2_undamped, l2_ratio;
  double x_damped, x_undamped, x_ratio;
};

struct CompareSummary {
  double t_final = 0.0;
  double final_l2_ratio = 1.0;
  double final_x_ratio = 1.0;
  bool undamped_diverged = false;
  std::string undamped_error;
  std::vector<CompareRow> series;
};

/// Damping on/off from identical data. Ratios are damped / undamped; a
/// vanishing pair of norms gives 1.
CompareSummary compare_damping(const RunConfig& cfg);
void write_compare_csv(const std::filesystem::path& path, const CompareSummary& s);

struct ResidualLevel {
  int Ny;
  double dt;
  double cancel_residual;
  double lambda_residual;
};

/// Residuals of the U and lambda relations at time t_eval, from the states
/// at t_eval - dt, t_eval, t_eval + dt of a run with configuration cfg.
ResidualLevel residuals_at(const RunConfig& cfg, double t_eval);

/// Suite kinds accepted by run_suite.
const std::vector<std::string>& suite_kinds();

/// Runs one pinned suite, writing artifacts under out and one line per
/// criterion to log. Returns 0 when every criterion passes, 1 otherwise.
/// Throws ParameterError for an unknown kind.
int run_suite(const std::string& kind, const std::filesystem::path& out, std::ostream& log);

// Pinned suite configurations, shared with the tests.
RunConfig oracle_linear_config();
RunConfig mms_config(int Ny, double dt);
RunConfig residual_config(int Ny, double dt);
RunConfig decay_config();
ToyConfig toy_oracle_config();
RunConfig compare_linear_config();
RunConfig compare_nonlinear_config();

}  // namespace prandtl
