#pragma once

// Hyperbolic toy model on the strip [0, 2pi) x [0, Ymax]:
//
//     d_t h = g,   d_t g - h d_x h - d_y^2 h = 0,   h = g = 0 at y = 0, Ymax.
//
// The linear wave part is advanced by the implicit midpoint rule with a
// symmetric fourth-order Laplacian (odd reflection at both walls), so its
// discrete energy is conserved to rounding. The transport term enters as
// two half kicks around it (Strang splitting, symmetric, order 2).

#include <vector>

#include "prandtl/banded.hpp"
#include "prandtl/grid.hpp"

namespace prandtl {

struct ToyState {
  Field h;
  Field g;
  double t = 0.0;
};

/// Symmetric discrete d_y^2 with homogeneous Dirichlet rows.
Field toy_laplacian(const Field& h);

class ToyIntegrator {
 public:
  /// Requires a uniform grid and dt <= 0.5 * dy.
  ToyIntegrator(GridPtr grid, double dt);
  ToyState step(const ToyState& s) const;
  double dt() const { return dt_; }

 private:
  GridPtr grid_;
  double dt_;
  BandedLU op_;
};

/// One step; builds the integrator on every call.
ToyState toy_step(const ToyState& state, double dt);

/// 1/2 (||g||^2 + ||d_y h||^2), the gradient term in the discrete form
/// (h, -D2 h) that the scheme conserves.
double toy_energy(const ToyState& s);

/// Sum over m of (m+1)/rho rho^{2(m+1)}/(m!)^4 (||d_x^m d_y h||^2 + ||d_x^m g||^2)
/// + (m+1)^3/rho^3 rho^{2(m+1)}/(m!)^4 ||d_x^m h||^2, square-rooted.
double toy_triple_norm(const ToyState& s, double rho);

struct ToyInitial {
  double amplitude = 1.0;
  int k = 0;              // x-dependence cos(kx); 0 = x-independent
  double center = 3.0;
  double sharpness = 4.0; // h0 = amplitude cos(kx) e^{-sharpness (y - center)^2}
  double velocity = 0.0;  // h1 = velocity * h0
};

struct ToyConfig {
  GridSpec grid{4, 257, 6.0, 0.0, 8};
  double dt = 1e-3;
  double t_final = 2.0;
  double rho0 = 0.5;
  int output_every = 10;
  ToyInitial initial;

  void validate() const;
};

ToyState toy_initial_state(const ToyConfig& cfg, const GridPtr& grid);

struct ToyRow {
  double t;
  double triple_norm;
  double energy;
  double max_h;
};

struct ToyResult {
  std::vector<ToyRow> rows;
  ToyState final_state;
};

ToyResult toy_run(const ToyConfig& cfg);

}  // namespace prandtl
