#pragma once

// Time integration of the damped Prandtl system
//
//     d_t u + u d_x u + v d_y u - d_y^2 u + delta u = s,   v = -int_0^y d_x u,
//     u = 0 at y = 0 and y = Ymax,
//
// co-evolved with the auxiliary primitive f (see auxiliary.hpp).
//
// Scheme: Crank-Nicolson on d_y^2 - delta, Heun (two-stage) on the
// transport terms and sources. The implicit matrix is real and identical
// for every Fourier mode, so it is factored once per step size.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "prandtl/banded.hpp"
#include "prandtl/bootstrap.hpp"
#include "prandtl/gevrey.hpp"
#include "prandtl/grid.hpp"
#include "prandtl/state.hpp"

namespace prandtl {

/// v = -int_0^y d_x u.
Field normal_velocity(const Field& u);

enum class Profile {
  GaussY2,  // y^2 e^{-y^2/2}
  ExpY2,    // y^2 e^{-y}
  Sine,     // sin(n pi y / Ymax)
};

/// amp_cos cos(kx) + amp_sin sin(kx), times a wall-normal profile.
struct InitialComponent {
  int k = 1;
  double amp_cos = 0.0;
  double amp_sin = 1.0;
  Profile profile = Profile::GaussY2;
  int n = 1;  // Sine only

  bool operator==(const InitialComponent&) const = default;
};

struct InitialData {
  std::vector<InitialComponent> components{InitialComponent{}};
  /// Rescale so that ||u0||_{X_{2 rho0}} = eps0.
  bool normalize = true;

  bool operator==(const InitialData&) const = default;
};

enum class Forcing { None, Manufactured };

struct RunConfig {
  GridSpec grid{16, 257, 9.0, 0.0, 8};
  GevreyParams gevrey = GevreyParams::defaults();
  double dt = 5e-3;
  double t_final = 20.0;
  InitialData initial;
  bool damping = true;
  /// Test hook: false drops u d_x u + v d_y u (and the transport of f).
  bool advection = true;
  /// Steps between output samples.
  int output_every = 20;
  std::string scheme = "imex-cn-heun";
  Forcing forcing = Forcing::None;
  bool compute_norms = true;
  bool compute_residuals = true;
  bool dump_fields = false;

  void validate() const;
  long steps() const;
};

/// Manufactured solution e^{-t} sin(x) y^2 e^{-y}.
double manufactured_solution(double t, double x, double y);
/// Source that makes the manufactured solution exact.
double manufactured_source(double t, double x, double y, bool damping, bool advection);
Field manufactured_field(const GridPtr& grid, double t);

/// Initial state for a config: normalized u0, f = 0, forcing attached.
SimState initial_state(const RunConfig& cfg, const GridPtr& grid);

/// Scale c applied to the raw initial components (1 without normalization).
double initial_scale(const RunConfig& cfg, const GridPtr& grid);

class Integrator {
 public:
  Integrator(GridPtr grid, double dt, bool damping, bool advection);

  double dt() const { return dt_; }
  const Grid& grid() const { return *grid_; }

  /// One step of the coupled (u, f) system.
  SimState step(const SimState& s) const;
  /// One step of f alone with u frozen at s.u.
  Field step_f_frozen(const SimState& s) const;

 private:
  struct Tendency {
    Field nu;
    Field nf;
  };
  Tendency explicit_terms(const Field& u, const Field& f, double t,
                          const SourceFn* forcing) const;
  /// (D2 - delta) g on interior rows, zero on boundary rows.
  Field apply_L(const Field& g) const;
  /// Solves (I - dt/2 L) x = rhs with the boundary rows replaced by the
  /// boundary conditions (homogeneous).
  Field solve(const Field& rhs, bool neumann_top) const;
  void check_cfl(const Field& u, double t) const;

  GridPtr grid_;
  double dt_;
  bool damping_;
  bool advection_;
  BandedLU dirichlet_;
  BandedLU neumann_;
};

/// L2 norm (interior rows) of the discrete PDE residual at the midpoint of
/// two consecutive states.
double pde_residual(const SimState& before, const SimState& after, const RunConfig& cfg);

struct SampleRow {
  NormReport report;
  double l2_u = 0.0;
  double rhs_H = 0.0;
  double rhs_C = 0.0;
  double cancel_residual = 0.0;  // U relation; NaN where no centered window exists
  double lambda_residual = 0.0;

  double scaled_x_norm() const;
};

struct RunHooks {
  /// Invoked for every sample state, in order (before residuals are known).
  std::function<void(const SimState&, int index)> on_sample;
  bool keep_states = false;
};

struct RunResult {
  std::vector<SampleRow> rows;
  std::vector<SimState> states;  // filled when keep_states is set
  std::optional<SimState> final_state;
  bool diverged = false;
  double divergence_time = 0.0;
  std::string error;
  double initial_scale = 1.0;

  std::vector<NormReport> reports() const;
};

/// Integrates to t_final. Divergence is captured in the result together
/// with the partial trajectory.
RunResult run(const RunConfig& cfg, const RunHooks& hooks = {});

}  // namespace prandtl
