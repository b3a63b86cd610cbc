#include "prandtl/toy.hpp"

#include <cmath>

#include "prandtl/errors.hpp"
#include "prandtl/gevrey.hpp"

namespace prandtl {

namespace {

double uniform_spacing(const Grid& g) {
  if (g.spec().stretch != 0.0) throw ParameterError("toy: requires a uniform grid (stretch = 0)");
  return g.Ymax() / (g.Ny() - 1);
}

constexpr double kLap[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};

// Interior node i, with h_{-j} = -h_j and h_{n-1+j} = -h_{n-1-j}.
template <class Get>
auto lap_at(int i, int n, Get get) {
  decltype(get(0)) s{};
  for (int o = -2; o <= 2; ++o) {
    int j = i + o;
    double sign = 1.0;
    if (j < 0) {
      j = -j;
      sign = -1.0;
    } else if (j > n - 1) {
      j = 2 * (n - 1) - j;
      sign = -1.0;
    }
    s += sign * kLap[o + 2] * get(j);
  }
  return s;
}

void pin_walls(Field& f) {
  const int last = f.grid().Ny() - 1;
  for (int k = 0; k <= f.grid().K(); ++k) {
    f(k, 0) = 0.0;
    f(k, last) = 0.0;
  }
}

// sum_k 2pi c_k dy sum_i a_k(y_i) conj(b_k(y_i)), real part; boundary rows are zero.
double inner(const Field& a, const Field& b, double dy) {
  double s = 0.0;
  for (int k = 0; k <= a.grid().K(); ++k) {
    double sk = 0.0;
    for (int i = 0; i < a.grid().Ny(); ++i) sk += (a(k, i) * std::conj(b(k, i))).real();
    s += (k == 0 ? 1.0 : 2.0) * sk;
  }
  return Grid::Lx * dy * s;
}

}  // namespace

Field toy_laplacian(const Field& h) {
  const Grid& g = h.grid();
  const double dy = uniform_spacing(g);
  const int n = g.Ny();
  const double c = 1.0 / (12.0 * dy * dy);
  Field out = Field::zeros_like(h);
  for (int k = 0; k <= g.K(); ++k) {
    auto src = h.mode(k);
    auto dst = out.mode(k);
    for (int i = 1; i < n - 1; ++i) dst[i] = c * lap_at(i, n, [&](int j) { return src[j]; });
  }
  return out;
}

ToyIntegrator::ToyIntegrator(GridPtr grid, double dt)
    : grid_(std::move(grid)), dt_(dt), op_(grid_->Ny(), 2, 2) {
  const double dy = uniform_spacing(*grid_);
  if (!(dt > 0.0)) throw ParameterError("toy: dt must be > 0");
  if (dt > 0.5 * dy)
    throw StepSizeError("toy: dt = " + std::to_string(dt) + " exceeds 0.5*dy = " +
                        std::to_string(0.5 * dy));
  // I - dt^2/4 A on interior rows, identity on the walls.
  const int n = grid_->Ny();
  const double c = 0.25 * dt * dt / (12.0 * dy * dy);
  op_.set(0, 0, 1.0);
  op_.set(n - 1, n - 1, 1.0);
  for (int i = 1; i < n - 1; ++i) {
    for (int col = std::max(1, i - 2); col <= std::min(n - 2, i + 2); ++col) {
      // Column weight of the reflected stencil.
      const double w = lap_at(i, n, [col](int j) { return j == col ? 1.0 : 0.0; });
      op_.set(i, col, (col == i ? 1.0 : 0.0) - c * w);
    }
  }
  op_.factorize();
}

ToyState ToyIntegrator::step(const ToyState& s) const {
  const double half = 0.5 * dt_;
  Field g = s.g;
  g.axpy(half, multiply(s.h, diff_x(s.h, 1)));
  pin_walls(g);

  // Implicit midpoint for h' = g, g' = A h:
  //   (I - dt^2/4 A) h1 = (I + dt^2/4 A) h + dt g,   g1 = g + dt/2 A (h + h1).
  const Field Ah = toy_laplacian(s.h);
  Field rhs = s.h;
  rhs.axpy(0.25 * dt_ * dt_, Ah);
  rhs.axpy(dt_, g);

  const int n = grid_->Ny();
  const int m = grid_->modes();
  std::vector<double> cols(static_cast<size_t>(n) * 2 * m);
  for (int k = 0; k < m; ++k) {
    double* re = cols.data() + static_cast<size_t>(2 * k) * n;
    double* im = re + n;
    for (int i = 0; i < n; ++i) {
      re[i] = rhs(k, i).real();
      im[i] = rhs(k, i).imag();
    }
    re[0] = im[0] = re[n - 1] = im[n - 1] = 0.0;
  }
  op_.solve(cols, 2 * m);
  Field h1(grid_);
  for (int k = 0; k < m; ++k) {
    const double* re = cols.data() + static_cast<size_t>(2 * k) * n;
    const double* im = re + n;
    for (int i = 0; i < n; ++i) h1(k, i) = cplx(re[i], k == 0 ? 0.0 : im[i]);
  }

  Field g1 = g;
  g1.axpy(half, Ah);
  g1.axpy(half, toy_laplacian(h1));
  g1.axpy(half, multiply(h1, diff_x(h1, 1)));
  pin_walls(g1);
  return {std::move(h1), std::move(g1), s.t + dt_};
}

ToyState toy_step(const ToyState& state, double dt) {
  return ToyIntegrator(state.h.grid_ptr(), dt).step(state);
}

double toy_energy(const ToyState& s) {
  const double dy = uniform_spacing(s.h.grid());
  return 0.5 * (inner(s.g, s.g, dy) - inner(toy_laplacian(s.h), s.h, dy));
}

double toy_triple_norm(const ToyState& s, double rho) {
  if (!(rho > 0.0)) throw ParameterError("toy_triple_norm: rho must be > 0");
  const Grid& grid = s.h.grid();
  const double dy = uniform_spacing(grid);
  const Field lap = toy_laplacian(s.h);
  const double log_rho = std::log(rho);
  double total = 0.0;
  for (int k = 0; k <= grid.K(); ++k) {
    double eh = 0.0, eg = 0.0, ey = 0.0;
    for (int i = 0; i < grid.Ny(); ++i) {
      eh += std::norm(s.h(k, i));
      eg += std::norm(s.g(k, i));
      ey -= (lap(k, i) * std::conj(s.h(k, i))).real();
    }
    const double scale = Grid::Lx * dy * (k == 0 ? 1.0 : 2.0);
    eh *= scale;
    eg *= scale;
    ey *= scale;
    if (eh == 0.0 && eg == 0.0 && ey == 0.0) continue;

    // log of rho^{2(m+1)} k^{2m} / (m!)^4
    auto log_base = [&](int m) {
      double v = 2.0 * (m + 1) * log_rho - 4.0 * std::lgamma(m + 1.0);
      if (m > 0) v += 2.0 * m * std::log(static_cast<double>(k));
      return v;
    };
    double sum = 0.0, prev = -1.0;
    for (int m = 0;; ++m) {
      if (k == 0 && m > 0) break;
      const double lb = log_base(m);
      const double term = std::exp(std::log(m + 1.0) - log_rho + lb) * (ey + eg) +
                          std::exp(3.0 * (std::log(m + 1.0) - log_rho) + lb) * eh;
      if (!std::isfinite(term))
        throw OverflowError("toy_triple_norm: non-finite term at k = " + std::to_string(k) +
                            ", m = " + std::to_string(m));
      if (m > 0 && term <= prev && term < kSeriesTolerance * sum) break;
      sum += term;
      prev = term;
      if (m > 100000) throw OverflowError("toy_triple_norm: series did not converge");
    }
    total += sum;
  }
  return std::sqrt(total);
}

void ToyConfig::validate() const {
  if (!(dt > 0.0)) throw ParameterError("toy: dt must be > 0");
  if (!(t_final >= 0.0)) throw ParameterError("toy: t_final must be >= 0");
  if (output_every < 1) throw ParameterError("toy: output_every must be >= 1");
  if (!(rho0 > 0.0 && rho0 <= 1.0)) throw ParameterError("toy: rho0 must lie in (0, 1]");
  if (initial.k < 0 || initial.k > grid.K)
    throw ParameterError("toy: initial wavenumber outside [0, K]");
  const double n = t_final / dt;
  if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n))
    throw ParameterError("toy: t_final must be an integer multiple of dt");
}

ToyState toy_initial_state(const ToyConfig& cfg, const GridPtr& grid) {
  const auto& in = cfg.initial;
  Field h = Field::from_function(grid, [&](double x, double y) {
    const double d = y - in.center;
    return in.amplitude * std::cos(in.k * x) * std::exp(-in.sharpness * d * d);
  });
  pin_walls(h);
  Field g = h;
  g *= in.velocity;
  return {std::move(h), std::move(g), 0.0};
}

ToyResult toy_run(const ToyConfig& cfg) {
  cfg.validate();
  const GridPtr grid = Grid::create(cfg.grid);
  const ToyIntegrator integ(grid, cfg.dt);
  const long nsteps = std::lround(cfg.t_final / cfg.dt);
  ToyState s = toy_initial_state(cfg, grid);
  ToyResult out{{}, s};
  auto record = [&](const ToyState& st) {
    out.rows.push_back({st.t, toy_triple_norm(st, radius_rho(st.t, cfg.rho0).rho),
                        toy_energy(st), max_abs(st.h)});
  };
  record(s);
  for (long n = 1; n <= nsteps; ++n) {
    s = integ.step(s);
    s.t = static_cast<double>(n) * cfg.dt;
    if (!s.h.all_finite() || !s.g.all_finite())
      throw DivergenceError("toy: non-finite values at t = " + std::to_string(s.t), s.t);
    if (n % cfg.output_every == 0 || n == nsteps) record(s);
  }
  out.final_state = std::move(s);
  return out;
}

}  // namespace prandtl
