#pragma once

// Discretization substrate: Fourier series in the periodic tangential
// variable x in [0, 2pi), finite differences on a truncated wall-normal
// interval y in [0, Ymax].
//
// A Field stores the coefficients u_k(y_i) for k = 0..K only; negative
// wavenumbers are implied by Hermitian symmetry u_{-k} = conj(u_k), so every
// Field represents a real function
//
//     u(x, y_i) = u_0(y_i) + 2 Re sum_{k=1}^{K} u_k(y_i) e^{ikx}.
//
// Storage is row-major (mode, node).

#include <complex>
#include <filesystem>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace prandtl {

using cplx = std::complex<double>;

struct GridSpec {
  int K = 8;            // largest retained wavenumber
  int Ny = 129;         // wall-normal nodes, including both ends
  double Ymax = 9.0;    // truncation height
  double stretch = 0.0; // 0 = uniform, > 0 clusters nodes toward y = 0
  int max_diff_x = 8;   // largest admissible order for diff_x

  bool operator==(const GridSpec&) const = default;
};

/// Finite-difference stencil: derivative at one node from nodes
/// first, first+1, ..., first+weights.size()-1.
struct Stencil {
  int first = 0;
  std::vector<double> weights;
};

class FourierTransform;

class Grid {
 public:
  static constexpr double Lx = 2.0 * std::numbers::pi;
  static constexpr int kMaxDiffY = 4;

  /// Validates the parameters and precomputes nodes, stencils and transforms.
  static std::shared_ptr<const Grid> create(const GridSpec& spec);

  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  const GridSpec& spec() const { return spec_; }
  int K() const { return spec_.K; }
  int modes() const { return spec_.K + 1; }
  int Ny() const { return spec_.Ny; }
  double Ymax() const { return spec_.Ymax; }
  /// Number of physical x samples; at least 3K+1 so that quadratic
  /// products are alias-free on the retained modes.
  int Nx() const { return nx_; }
  double x(int n) const { return Lx * n / nx_; }

  std::span<const double> y() const { return y_; }
  double y(int i) const { return y_[i]; }
  /// Smallest node spacing.
  double dy_min() const { return dy_min_; }

  /// Stencil for d^j/dy^j at node i, j in 1..4.
  const Stencil& stencil(int j, int i) const { return stencils_[j - 1][i]; }
  /// Trapezoid weights over [0, Ymax].
  std::span<const double> trapezoid() const { return trapezoid_; }
  /// Weights integrating the local cubic interpolant over [y_i, y_{i+1}].
  const Stencil& interval_quadrature(int i) const { return interval_quad_[i]; }

  const FourierTransform& transform() const { return *transform_; }

 private:
  explicit Grid(const GridSpec& spec);

  GridSpec spec_;
  int nx_ = 0;
  double dy_min_ = 0.0;
  std::vector<double> y_;
  std::vector<std::vector<Stencil>> stencils_;
  std::vector<double> trapezoid_;
  std::vector<Stencil> interval_quad_;
  std::unique_ptr<FourierTransform> transform_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Finite-difference weights (Fornberg's recursion) for derivative orders
/// 0..max_order at z using the given nodes. Result is [node][order].
std::vector<std::vector<double>> fd_weights(double z, std::span<const double> nodes,
                                            int max_order);

/// Real <-> spectral transforms along x for all nodes at once. Physical
/// samples are laid out (x-sample, node) row-major.
class FourierTransform {
 public:
  FourierTransform(int K, int Nx, int Ny);
  ~FourierTransform();
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  void forward(std::span<const double> physical, std::span<cplx> coeffs) const;
  void inverse(std::span<const cplx> coeffs, std::span<double> physical) const;

 private:
  int K_, nx_, ny_;
  void* forward_plan_;
  void* inverse_plan_;
};

class Field {
 public:
  explicit Field(GridPtr grid);

  static Field zeros_like(const Field& other) { return Field(other.grid_); }
  /// Forward transform of physical samples, truncated to |k| <= K.
  static Field from_physical(GridPtr grid, std::span<const double> physical);
  /// Samples f(x_n, y_i) on the physical grid.
  template <class F>
  static Field from_function(GridPtr grid, F&& f) {
    std::vector<double> phys(static_cast<size_t>(grid->Nx()) * grid->Ny());
    for (int n = 0; n < grid->Nx(); ++n)
      for (int i = 0; i < grid->Ny(); ++i)
        phys[static_cast<size_t>(n) * grid->Ny() + i] = f(grid->x(n), grid->y(i));
    return from_physical(std::move(grid), phys);
  }

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }

  cplx& operator()(int k, int i) { return coeffs_[index(k, i)]; }
  const cplx& operator()(int k, int i) const { return coeffs_[index(k, i)]; }
  std::span<cplx> mode(int k) {
    return {coeffs_.data() + index(k, 0), static_cast<size_t>(grid_->Ny())};
  }
  std::span<const cplx> mode(int k) const {
    return {coeffs_.data() + index(k, 0), static_cast<size_t>(grid_->Ny())};
  }
  std::span<cplx> coeffs() { return coeffs_; }
  std::span<const cplx> coeffs() const { return coeffs_; }

  std::vector<double> to_physical() const;
  /// Value at an arbitrary x on node i.
  double eval(double x, int i) const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);
  /// this += s * o
  Field& axpy(double s, const Field& o);

  bool all_finite() const;
  double max_abs_coeff() const;

 private:
  size_t index(int k, int i) const {
    return static_cast<size_t>(k) * grid_->Ny() + static_cast<size_t>(i);
  }

  GridPtr grid_;
  std::vector<cplx> coeffs_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Exact spectral derivative: coefficients times (ik)^m.
Field diff_x(const Field& u, int m);
/// Fourth-order finite-difference derivative d^j/dy^j, j in 1..4, with
/// one-sided closures of matching order at the ends.
Field diff_y(const Field& u, int j);
/// Cumulative integral from y = 0 to every node (piecewise cubic, order 4).
Field integrate_y_from_0(const Field& u);
/// Pointwise product with 3/2-padding dealiasing, truncated to |k| <= K.
Field multiply(const Field& a, const Field& b);
/// Pointwise product by an x-independent profile g(y_i).
Field scale_rows(const Field& u, std::span<const double> profile);

/// L2 norm over [0, 2pi) x [0, Ymax] (trapezoid in y). When interior_only
/// is set the two boundary rows are excluded.
double l2_norm(const Field& u, bool interior_only = false);
/// Largest |u(x_n, y_i)| over the physical grid.
double max_abs(const Field& u);
/// L2 norm in x of the trace u(., y_i).
double trace_norm(const Field& u, int i);

/// Writes <base>.json (grid metadata) and <base>.bin (little-endian
/// doubles, (mode, node) row-major, real/imag interleaved).
void write_field_dump(const std::filesystem::path& base, const Field& u,
                      const std::string& name, double t);
/// Reads a dump written by write_field_dump onto a freshly created grid.
Field read_field_dump(const std::filesystem::path& base);

}  // namespace prandtl
