#include "mac/spectral.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <fftw3.h>
#include <fmt/format.h>

#include "mac/parallel.hpp"

namespace mac {

namespace {

// Below this magnitude the phi-functions are summed as power series; the
// direct expm1 formulas lose about |log10 |z|| digits of phi2 near 0.
constexpr double kSeriesThreshold = 1.0;
constexpr int kSeriesMaxTerms = 40;

// sum_{j>=0} z^j / (j + shift)!
double phi_series(double z, int shift) {
  double fact = 1.0;
  for (int j = 2; j <= shift; ++j) fact *= j;
  double term = 1.0 / fact;
  double sum = term;
  for (int j = 1; j < kSeriesMaxTerms; ++j) {
    term *= z / (j + shift);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

double laplacian_symbol_at(const GridSpec& grid, const std::array<int, 3>& k) {
  const double scale = 4.0 / (grid.h() * grid.h());
  double mu = 0.0;
  for (int a = 0; a < grid.d; ++a) {
    const double s = std::sin(std::numbers::pi * k[static_cast<std::size_t>(a)] / grid.n);
    mu += scale * s * s;
  }
  return mu;
}

LaplacianSymbol laplacian_symbol(const GridSpec& grid) {
  LaplacianSymbol sym{grid, std::vector<double>(grid.cell_count())};
  for (std::size_t k = 0; k < sym.mu.size(); ++k) sym.mu[k] = laplacian_symbol_at(grid, grid.coords(k));
  return sym;
}

double phi1(double z) {
  if (std::abs(z) < kSeriesThreshold) return phi_series(z, 1);
  return std::expm1(z) / z;
}

double phi2(double z) {
  if (std::abs(z) < kSeriesThreshold) return phi_series(z, 2);
  return (std::expm1(z) - z) / (z * z);
}

std::size_t HalfSpectrum::mode_count() const {
  std::size_t c = static_cast<std::size_t>(last_axis_length());
  for (int a = 0; a + 1 < grid.d; ++a) c *= static_cast<std::size_t>(grid.n);
  return c;
}

std::array<int, 3> HalfSpectrum::wavenumber(std::size_t mode) const {
  std::array<int, 3> k{0, 0, 0};
  const auto last = static_cast<std::size_t>(last_axis_length());
  k[static_cast<std::size_t>(grid.d - 1)] = static_cast<int>(mode % last);
  mode /= last;
  for (int a = grid.d - 2; a >= 0; --a) {
    k[static_cast<std::size_t>(a)] = static_cast<int>(mode % static_cast<std::size_t>(grid.n));
    mode /= static_cast<std::size_t>(grid.n);
  }
  return k;
}

PropagatorTables build_propagator(const GridSpec& grid, double kappa, double epsilon, double tau) {
  if (!(kappa > 0.0) || !(epsilon > 0.0) || !(tau > 0.0)) {
    throw std::invalid_argument(
        fmt::format("propagator needs kappa, epsilon, tau > 0 (got {}, {}, {})", kappa, epsilon, tau));
  }
  PropagatorTables t;
  t.layout = HalfSpectrum{grid};
  t.kappa = kappa;
  t.epsilon = epsilon;
  t.tau = tau;
  const std::size_t modes = t.layout.mode_count();
  t.ell.resize(modes);
  t.a.resize(modes);
  t.b.resize(modes);
  t.c.resize(modes);
  const double eps2 = epsilon * epsilon;
  for (std::size_t k = 0; k < modes; ++k) {
    const double ell = kappa + eps2 * laplacian_symbol_at(grid, t.layout.wavenumber(k));
    const double z = -tau * ell;
    t.ell[k] = ell;
    t.a[k] = std::exp(z);
    t.b[k] = tau * phi1(z);
    t.c[k] = tau * phi2(z);
  }
  return t;
}

ModeField::ModeField(GridSpec grid, int m)
    : layout_{grid}, m_(m), modes_(layout_.mode_count()), data_(static_cast<std::size_t>(m * m) * modes_) {}

std::span<std::complex<double>> ModeField::component(int e) {
  return std::span<std::complex<double>>(data_).subspan(static_cast<std::size_t>(e) * modes_, modes_);
}

std::span<const std::complex<double>> ModeField::component(int e) const {
  return std::span<const std::complex<double>>(data_).subspan(static_cast<std::size_t>(e) * modes_, modes_);
}

struct FftEngine::Plans {
  GridSpec grid;
  std::size_t cells = 0;
  std::size_t modes = 0;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }
};

FftEngine::FftEngine(const GridSpec& grid) : plans_(std::make_unique<Plans>()) {
  plans_->grid = grid;
  plans_->cells = grid.cell_count();
  plans_->modes = HalfSpectrum{grid}.mode_count();
  int dims[3] = {grid.n, grid.n, grid.n};

  std::lock_guard lock(planner_mutex());
  double* real = fftw_alloc_real(plans_->cells);
  fftw_complex* cplx = fftw_alloc_complex(plans_->modes);
  // ESTIMATE keeps plan selection (and therefore results) reproducible run to run.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->r2c = fftw_plan_dft_r2c(grid.d, dims, real, cplx, flags);
  plans_->c2r = fftw_plan_dft_c2r(grid.d, dims, cplx, real, flags);
  fftw_free(real);
  fftw_free(cplx);
  if (!plans_->r2c || !plans_->c2r) throw std::runtime_error("FFTW plan creation failed");
}

FftEngine::~FftEngine() = default;
FftEngine::FftEngine(FftEngine&&) noexcept = default;
FftEngine& FftEngine::operator=(FftEngine&&) noexcept = default;

const GridSpec& FftEngine::grid() const { return plans_->grid; }

void FftEngine::forward(std::span<const double> in, std::span<std::complex<double>> out) const {
  if (in.size() != plans_->cells || out.size() != plans_->modes) throw std::invalid_argument("fft size mismatch");
  // r2c leaves its input untouched.
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void FftEngine::inverse(std::span<const std::complex<double>> in, std::span<double> out,
                        std::span<std::complex<double>> scratch) const {
  if (in.size() != plans_->modes || scratch.size() != plans_->modes || out.size() != plans_->cells) {
    throw std::invalid_argument("fft size mismatch");
  }
  std::copy(in.begin(), in.end(), scratch.begin());
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  const double scale = 1.0 / static_cast<double>(plans_->cells);
  for (double& v : out) v *= scale;
}

void FftEngine::forward(const MatrixField& field, ModeField& modes) const {
  if (!(field.grid() == grid()) || !(modes.grid() == grid()) || modes.m() != field.m()) {
    throw std::invalid_argument("fft shape mismatch");
  }
  parallel_for(static_cast<std::size_t>(field.entry_count()), [&](std::size_t e) {
    forward(field.component(static_cast<int>(e)), modes.component(static_cast<int>(e)));
  });
}

void FftEngine::inverse(const ModeField& modes, MatrixField& field) const {
  if (!(field.grid() == grid()) || !(modes.grid() == grid()) || modes.m() != field.m()) {
    throw std::invalid_argument("fft shape mismatch");
  }
  parallel_for(static_cast<std::size_t>(field.entry_count()), [&](std::size_t e) {
    thread_local std::vector<std::complex<double>> scratch;
    scratch.resize(plans_->modes);
    inverse(modes.component(static_cast<int>(e)), field.component(static_cast<int>(e)), scratch);
  });
}

ModeField fft_forward(const MatrixField& field) {
  FftEngine engine(field.grid());
  ModeField modes(field.grid(), field.m());
  engine.forward(field, modes);
  return modes;
}

MatrixField fft_inverse(const ModeField& modes) {
  FftEngine engine(modes.grid());
  MatrixField field(modes.grid(), modes.m());
  engine.inverse(modes, field);
  return field;
}

double dissipation_y1(double x) {
  // x - x/(1 - e^x) == x / (1 - e^{-x}) == 1 / phi1(-x)
  return 1.0 / phi1(-x);
}

double dissipation_y2(double x) {
  // x^2 / (e^x - 1 - x) == 1 / phi2(x)
  return x + 1.0 / phi2(x) - 0.5 * dissipation_y1(x);
}

SymbolCheckReport dissipation_symbol_check(std::span<const double> samples, double tol) {
  SymbolCheckReport r;
  r.min_y1 = std::numeric_limits<double>::infinity();
  r.min_y2 = std::numeric_limits<double>::infinity();
  for (double x : samples) {
    const double y1 = dissipation_y1(x);
    const double y2 = dissipation_y2(x);
    r.min_y1 = std::min(r.min_y1, y1);
    r.min_y2 = std::min(r.min_y2, y2);
    const bool ok = y1 >= -tol && y2 >= -tol && !std::isnan(y1) && !std::isnan(y2);
    if (!ok && r.passed) {
      r.passed = false;
      r.offending_x = x;
    }
  }
  return r;
}

}  // namespace mac
