#include "prandtl/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>

#include <json.hpp>

#include "prandtl/errors.hpp"

namespace prandtl {

namespace {

// The FFTW planner is not re-entrant; plan execution with explicit arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_smooth_number(int n) {
  for (int p : {2, 3, 5})
    while (n % p == 0) n /= p;
  return n == 1;
}

int physical_size(int K) {
  int n = 3 * K + 1;
  while (!is_smooth_number(n)) ++n;
  return n;
}

// Solves the 4x4 moment system sum_i w_i s_i^p = 1/(p+1), p = 0..3.
std::array<double, 4> cubic_interval_weights(std::array<double, 4> s) {
  double a[4][5];
  for (int p = 0; p < 4; ++p) {
    for (int i = 0; i < 4; ++i) a[p][i] = std::pow(s[i], p);
    a[p][4] = 1.0 / (p + 1);
  }
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    for (int q = 0; q < 5; ++q) std::swap(a[c][q], a[piv][q]);
    for (int r = 0; r < 4; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (int q = c; q < 5; ++q) a[r][q] -= f * a[c][q];
    }
  }
  std::array<double, 4> w{};
  for (int i = 0; i < 4; ++i) w[i] = a[i][4] / a[i][i];
  return w;
}

}  // namespace

std::vector<std::vector<double>> fd_weights(double z, std::span<const double> x,
                                            int max_order) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(max_order + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  return c;
}

// ---------------------------------------------------------------------------
// FourierTransform

FourierTransform::FourierTransform(int K, int Nx, int Ny) : K_(K), nx_(Nx), ny_(Ny) {
  const size_t nreal = static_cast<size_t>(Nx) * Ny;
  const size_t ncplx = static_cast<size_t>(Nx / 2 + 1) * Ny;
  std::vector<double> in(nreal);
  std::vector<cplx> out(ncplx);
  int n[] = {Nx};
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard<std::mutex> lock(planner_mutex());
  forward_plan_ = fftw_plan_many_dft_r2c(1, n, Ny, in.data(), nullptr, Ny, 1,
                                         reinterpret_cast<fftw_complex*>(out.data()),
                                         nullptr, Ny, 1, flags);
  inverse_plan_ = fftw_plan_many_dft_c2r(1, n, Ny,
                                         reinterpret_cast<fftw_complex*>(out.data()),
                                         nullptr, Ny, 1, in.data(), nullptr, Ny, 1, flags);
  if (!forward_plan_ || !inverse_plan_) throw std::runtime_error("FFTW planning failed");
}

FourierTransform::~FourierTransform() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void FourierTransform::forward(std::span<const double> physical,
                               std::span<cplx> coeffs) const {
  std::vector<double> in(physical.begin(), physical.end());
  std::vector<cplx> out(static_cast<size_t>(nx_ / 2 + 1) * ny_);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / nx_;
  for (int k = 0; k <= K_; ++k)
    for (int i = 0; i < ny_; ++i)
      coeffs[static_cast<size_t>(k) * ny_ + i] = out[static_cast<size_t>(k) * ny_ + i] * scale;
  for (int i = 0; i < ny_; ++i) coeffs[i].imag(0.0);
}

void FourierTransform::inverse(std::span<const cplx> coeffs,
                               std::span<double> physical) const {
  std::vector<cplx> in(static_cast<size_t>(nx_ / 2 + 1) * ny_, cplx{});
  std::copy(coeffs.begin(), coeffs.begin() + static_cast<ptrdiff_t>(K_ + 1) * ny_,
            in.begin());
  for (int i = 0; i < ny_; ++i) in[i].imag(0.0);
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(in.data()), physical.data());
}

// ---------------------------------------------------------------------------
// Grid

std::shared_ptr<const Grid> Grid::create(const GridSpec& spec) {
  if (spec.K < 1) throw ParameterError("grid: K must be >= 1");
  if (spec.Ny < 16) throw ParameterError("grid: Ny must be >= 16");
  if (!(spec.Ymax > 0.0)) throw ParameterError("grid: Ymax must be > 0");
  if (!(spec.stretch >= 0.0)) throw ParameterError("grid: stretch must be >= 0");
  if (spec.max_diff_x < 0) throw ParameterError("grid: max_diff_x must be >= 0");
  return std::shared_ptr<const Grid>(new Grid(spec));
}

Grid::~Grid() = default;

Grid::Grid(const GridSpec& spec) : spec_(spec), nx_(physical_size(spec.K)) {
  const int ny = spec.Ny;
  const double beta = spec.stretch;
  y_.resize(ny);
  for (int i = 0; i < ny; ++i) {
    const double s = static_cast<double>(i) / (ny - 1);
    y_[i] = spec.Ymax * s / (1.0 + beta * (1.0 - s));
  }
  y_.front() = 0.0;
  y_.back() = spec.Ymax;
  dy_min_ = y_[1] - y_[0];
  for (int i = 1; i < ny; ++i) dy_min_ = std::min(dy_min_, y_[i] - y_[i - 1]);

  // Interior: centered 5 points for j <= 2, 7 points for j = 3, 4.
  // Near the ends: one-sided windows of j + 4 points.
  stencils_.resize(kMaxDiffY);
  for (int j = 1; j <= kMaxDiffY; ++j) {
    auto& row = stencils_[j - 1];
    row.resize(ny);
    const int half = j <= 2 ? 2 : 3;
    const int nb = j + 4;
    for (int i = 0; i < ny; ++i) {
      Stencil st;
      int width;
      if (i - half >= 0 && i + half <= ny - 1) {
        st.first = i - half;
        width = 2 * half + 1;
      } else {
        width = nb;
        st.first = std::clamp(i - nb / 2, 0, ny - nb);
      }
      auto w = fd_weights(y_[i], std::span<const double>(y_).subspan(st.first, width), j);
      st.weights.resize(width);
      for (int q = 0; q < width; ++q) st.weights[q] = w[q][j];
      row[i] = std::move(st);
    }
  }

  trapezoid_.assign(ny, 0.0);
  for (int i = 0; i + 1 < ny; ++i) {
    const double h = y_[i + 1] - y_[i];
    trapezoid_[i] += 0.5 * h;
    trapezoid_[i + 1] += 0.5 * h;
  }

  interval_quad_.resize(ny - 1);
  for (int i = 0; i + 1 < ny; ++i) {
    const int first = std::clamp(i - 1, 0, ny - 4);
    const double a = y_[i];
    const double h = y_[i + 1] - y_[i];
    std::array<double, 4> s{};
    for (int q = 0; q < 4; ++q) s[q] = (y_[first + q] - a) / h;
    auto w = cubic_interval_weights(s);
    Stencil st;
    st.first = first;
    st.weights.resize(4);
    for (int q = 0; q < 4; ++q) st.weights[q] = w[q] * h;
    interval_quad_[i] = std::move(st);
  }

  transform_ = std::make_unique<FourierTransform>(spec.K, nx_, ny);
}

// ---------------------------------------------------------------------------
// Field

Field::Field(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw ParameterError("field: null grid");
  coeffs_.assign(static_cast<size_t>(grid_->modes()) * grid_->Ny(), cplx{});
}

Field Field::from_physical(GridPtr grid, std::span<const double> physical) {
  Field out(std::move(grid));
  if (physical.size() != static_cast<size_t>(out.grid_->Nx()) * out.grid_->Ny())
    throw ParameterError("field: physical array has wrong size");
  out.grid_->transform().forward(physical, out.coeffs_);
  return out;
}

std::vector<double> Field::to_physical() const {
  std::vector<double> phys(static_cast<size_t>(grid_->Nx()) * grid_->Ny());
  grid_->transform().inverse(coeffs_, phys);
  return phys;
}

double Field::eval(double x, int i) const {
  double v = (*this)(0, i).real();
  for (int k = 1; k <= grid_->K(); ++k)
    v += 2.0 * ((*this)(k, i) * std::polar(1.0, k * x)).real();
  return v;
}

Field& Field::operator+=(const Field& o) {
  for (size_t n = 0; n < coeffs_.size(); ++n) coeffs_[n] += o.coeffs_[n];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  for (size_t n = 0; n < coeffs_.size(); ++n) coeffs_[n] -= o.coeffs_[n];
  return *this;
}

Field& Field::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

Field& Field::axpy(double s, const Field& o) {
  for (size_t n = 0; n < coeffs_.size(); ++n) coeffs_[n] += s * o.coeffs_[n];
  return *this;
}

bool Field::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const cplx& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

double Field::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

// ---------------------------------------------------------------------------
// Operators

Field diff_x(const Field& u, int m) {
  const Grid& g = u.grid();
  if (m < 0 || m > g.spec().max_diff_x)
    throw ParameterError("diff_x: order " + std::to_string(m) + " outside [0, " +
                         std::to_string(g.spec().max_diff_x) + "]");
  Field out = Field::zeros_like(u);
  for (int k = 0; k <= g.K(); ++k) {
    cplx factor = 1.0;
    for (int p = 0; p < m; ++p) factor *= cplx(0.0, k);
    auto src = u.mode(k);
    auto dst = out.mode(k);
    for (int i = 0; i < g.Ny(); ++i) dst[i] = factor * src[i];
  }
  return out;
}

Field diff_y(const Field& u, int j) {
  const Grid& g = u.grid();
  if (j < 1 || j > Grid::kMaxDiffY)
    throw ParameterError("diff_y: order " + std::to_string(j) + " outside [1, 4]");
  Field out = Field::zeros_like(u);
  for (int k = 0; k <= g.K(); ++k) {
    auto src = u.mode(k);
    auto dst = out.mode(k);
    for (int i = 0; i < g.Ny(); ++i) {
      const Stencil& st = g.stencil(j, i);
      cplx acc{};
      for (size_t q = 0; q < st.weights.size(); ++q) acc += st.weights[q] * src[st.first + q];
      dst[i] = acc;
    }
  }
  return out;
}

Field integrate_y_from_0(const Field& u) {
  const Grid& g = u.grid();
  Field out = Field::zeros_like(u);
  for (int k = 0; k <= g.K(); ++k) {
    auto src = u.mode(k);
    auto dst = out.mode(k);
    dst[0] = 0.0;
    for (int i = 0; i + 1 < g.Ny(); ++i) {
      const Stencil& st = g.interval_quadrature(i);
      cplx acc{};
      for (size_t q = 0; q < 4; ++q) acc += st.weights[q] * src[st.first + q];
      dst[i + 1] = dst[i] + acc;
    }
  }
  return out;
}

Field multiply(const Field& a, const Field& b) {
  auto pa = a.to_physical();
  const auto pb = b.to_physical();
  for (size_t n = 0; n < pa.size(); ++n) pa[n] *= pb[n];
  return Field::from_physical(a.grid_ptr(), pa);
}

Field scale_rows(const Field& u, std::span<const double> profile) {
  Field out = u;
  for (int k = 0; k <= u.grid().K(); ++k) {
    auto m = out.mode(k);
    for (int i = 0; i < u.grid().Ny(); ++i) m[i] *= profile[i];
  }
  return out;
}

double l2_norm(const Field& u, bool interior_only) {
  const Grid& g = u.grid();
  const auto w = g.trapezoid();
  const int lo = interior_only ? 1 : 0;
  const int hi = interior_only ? g.Ny() - 1 : g.Ny();
  double sum = 0.0;
  for (int k = 0; k <= g.K(); ++k) {
    const double wk = k == 0 ? 1.0 : 2.0;
    auto m = u.mode(k);
    double s = 0.0;
    for (int i = lo; i < hi; ++i) s += w[i] * std::norm(m[i]);
    sum += wk * s;
  }
  return std::sqrt(Grid::Lx * sum);
}

double max_abs(const Field& u) {
  double m = 0.0;
  for (double v : u.to_physical()) m = std::max(m, std::abs(v));
  return m;
}

double trace_norm(const Field& u, int i) {
  double s = 0.0;
  for (int k = 0; k <= u.grid().K(); ++k) s += (k == 0 ? 1.0 : 2.0) * std::norm(u(k, i));
  return std::sqrt(Grid::Lx * s);
}

// ---------------------------------------------------------------------------
// Dumps

namespace {

void write_le_doubles(std::ofstream& os, std::span<const double> data) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size() * sizeof(double)));
  } else {
    for (double d : data) {
      auto bits = std::bit_cast<uint64_t>(d);
      unsigned char bytes[8];
      for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
      os.write(reinterpret_cast<const char*>(bytes), 8);
    }
  }
}

std::vector<double> read_le_doubles(std::ifstream& is, size_t count) {
  std::vector<unsigned char> raw(count * 8);
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<size_t>(is.gcount()) != raw.size())
    throw IoError("field dump: truncated binary payload");
  std::vector<double> out(count);
  for (size_t n = 0; n < count; ++n) {
    uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<uint64_t>(raw[n * 8 + b]) << (8 * b);
    out[n] = std::bit_cast<double>(bits);
  }
  return out;
}

}  // namespace

void write_field_dump(const std::filesystem::path& base, const Field& u,
                      const std::string& name, double t) {
  const Grid& g = u.grid();
  auto json_path = base;
  json_path += ".json";
  auto bin_path = base;
  bin_path += ".bin";

  nlohmann::json meta;
  meta["name"] = name;
  meta["t"] = t;
  meta["K"] = g.K();
  meta["modes"] = g.modes();
  meta["Ny"] = g.Ny();
  meta["Ymax"] = g.Ymax();
  meta["stretch"] = g.spec().stretch;
  meta["Lx"] = Grid::Lx;
  meta["y"] = std::vector<double>(g.y().begin(), g.y().end());
  meta["layout"] = "row-major (mode k = 0..K, node), real/imag interleaved";
  meta["dtype"] = "float64 little-endian";
  meta["binary"] = bin_path.filename().string();

  std::ofstream js(json_path);
  if (!js) throw IoError("cannot write " + json_path.string());
  js << meta.dump(2) << '\n';

  std::ofstream bin(bin_path, std::ios::binary);
  if (!bin) throw IoError("cannot write " + bin_path.string());
  const auto c = u.coeffs();
  write_le_doubles(bin, std::span<const double>(reinterpret_cast<const double*>(c.data()),
                                                c.size() * 2));
}

Field read_field_dump(const std::filesystem::path& base) {
  auto json_path = base;
  json_path += ".json";
  auto bin_path = base;
  bin_path += ".bin";
  std::ifstream js(json_path);
  if (!js) throw IoError("cannot read " + json_path.string());
  nlohmann::json meta;
  try {
    js >> meta;
  } catch (const std::exception& e) {
    throw IoError(json_path.string() + ": " + e.what());
  }
  GridSpec spec;
  spec.K = meta.at("K").get<int>();
  spec.Ny = meta.at("Ny").get<int>();
  spec.Ymax = meta.at("Ymax").get<double>();
  spec.stretch = meta.at("stretch").get<double>();
  Field u(Grid::create(spec));

  std::ifstream bin(bin_path, std::ios::binary);
  if (!bin) throw IoError("cannot read " + bin_path.string());
  const auto values = read_le_doubles(bin, u.coeffs().size() * 2);
  auto c = u.coeffs();
  for (size_t n = 0; n < c.size(); ++n) c[n] = cplx(values[2 * n], values[2 * n + 1]);
  return u;
}

}  // namespace prandtl
