#pragma once

// Fourier-space machinery for the periodic central-difference Laplacian:
// the symbol of -Delta_h, phi-functions, ETD propagator tables and FFTs.

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mac/field.hpp"

namespace mac {

/// Eigenvalues of -Delta_h for every discrete Fourier mode of the grid, in
/// full-spectrum cell order: mu_k = sum_a (4/h^2) sin^2(pi k_a / n).
struct LaplacianSymbol {
  GridSpec grid;
  std::vector<double> mu;
};

LaplacianSymbol laplacian_symbol(const GridSpec& grid);

/// Symbol value for one wavenumber vector (unused axes ignored).
double laplacian_symbol_at(const GridSpec& grid, const std::array<int, 3>& k);

/// phi1(z) = (e^z - 1)/z, phi2(z) = (e^z - 1 - z)/z^2, with phi1(0) = 1, phi2(0) = 1/2.
double phi1(double z);
double phi2(double z);

/// Modes kept by the real-to-complex transform: the last axis is truncated to n/2 + 1.
struct HalfSpectrum {
  GridSpec grid;

  std::size_t mode_count() const;
  int last_axis_length() const { return grid.n / 2 + 1; }
  /// Wavenumber indices (0..n-1 per axis) of a half-spectrum mode.
  std::array<int, 3> wavenumber(std::size_t mode) const;
};

/// Per-mode ETD coefficients for L = kappa I - eps^2 Delta_h on the half spectrum:
/// a = e^{-tau l}, b = tau phi1(-tau l), c = tau phi2(-tau l).
struct PropagatorTables {
  HalfSpectrum layout;
  double kappa = 0.0;
  double epsilon = 0.0;
  double tau = 0.0;
  std::vector<double> ell;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;
};

PropagatorTables build_propagator(const GridSpec& grid, double kappa, double epsilon, double tau);

/// Spectral coefficients of every matrix entry, planar like MatrixField.
class ModeField {
 public:
  ModeField() = default;
  ModeField(GridSpec grid, int m);

  const GridSpec& grid() const { return layout_.grid; }
  const HalfSpectrum& layout() const { return layout_; }
  int m() const { return m_; }
  std::size_t mode_count() const { return modes_; }

  std::span<std::complex<double>> component(int e);
  std::span<const std::complex<double>> component(int e) const;

 private:
  HalfSpectrum layout_;
  int m_ = 0;
  std::size_t modes_ = 0;
  std::vector<std::complex<double>> data_;
};

/// Unnormalized forward / normalized inverse real DFT on one grid.
/// Execution is thread-safe; plans are created once per engine.
class FftEngine {
 public:
  explicit FftEngine(const GridSpec& grid);
  ~FftEngine();
  FftEngine(FftEngine&&) noexcept;
  FftEngine& operator=(FftEngine&&) noexcept;
  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

  const GridSpec& grid() const;

  void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
  /// `scratch` must hold mode_count values; the transform overwrites it.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out,
               std::span<std::complex<double>> scratch) const;

  void forward(const MatrixField& field, ModeField& modes) const;
  void inverse(const ModeField& modes, MatrixField& field) const;

 private:
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

ModeField fft_forward(const MatrixField& field);
MatrixField fft_inverse(const ModeField& modes);

/// y1(x) = x - x/(1 - e^x) and y2(x) = x + x^2/(e^x - 1 - x) - y1(x)/2, with
/// y1(0) = 1, y2(0) = 3/2. Both are non-negative on the real line.
double dissipation_y1(double x);
double dissipation_y2(double x);

struct SymbolCheckReport {
  bool passed = true;
  double min_y1 = 0.0;
  double min_y2 = 0.0;
  std::optional<double> offending_x;
};

/// Checks y1(x) >= -tol and y2(x) >= -tol at every sample.
SymbolCheckReport dissipation_symbol_check(std::span<const double> samples, double tol = 1e-12);

}  // namespace mac
