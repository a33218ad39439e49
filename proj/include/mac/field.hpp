#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "mac/matcore.hpp"

namespace mac {

/// Uniform periodic grid on [-1/2, 1/2]^d with n cells per axis.
struct GridSpec {
  int d = 2;
  int n = 1;

  GridSpec() = default;
  GridSpec(int d_, int n_);

  double h() const { return 1.0 / n; }
  std::size_t cell_count() const;
  /// h^d, the quadrature weight of one cell.
  double cell_volume() const;

  /// Lattice coordinates of a cell; the last axis varies fastest. Unused axes are 0.
  std::array<int, 3> coords(std::size_t cell) const;
  std::size_t index(const std::array<int, 3>& c) const;
  /// Index of the neighbour one step forward along `axis`, with periodic wrap.
  std::size_t forward_neighbor(std::size_t cell, int axis) const;

  /// Cell-centre position x_a = -1/2 + (i_a + 1/2) h.
  std::array<double, 3> cell_center(std::size_t cell) const;

  bool operator==(const GridSpec&) const = default;
};

/// Grid of m x m matrices, stored planar: one contiguous array per matrix entry.
class MatrixField {
 public:
  MatrixField() = default;
  MatrixField(GridSpec grid, int m);

  const GridSpec& grid() const { return grid_; }
  int m() const { return m_; }
  std::size_t cell_count() const { return cells_; }
  int entry_count() const { return m_ * m_; }

  /// Values of matrix entry (i, j) across all cells.
  std::span<double> component(int i, int j) { return component(i * m_ + j); }
  std::span<const double> component(int i, int j) const { return component(i * m_ + j); }
  std::span<double> component(int e);
  std::span<const double> component(int e) const;

  std::span<double> raw() { return data_; }
  std::span<const double> raw() const { return data_; }

  SquareMatrix at(std::size_t cell) const;
  void set(std::size_t cell, const SquareMatrix& a);
  /// Row-major copy of one cell into `out` (size m^2).
  void gather(std::size_t cell, std::span<double> out) const;
  void scatter(std::size_t cell, std::span<const double> in);

  bool all_finite() const;
  bool operator==(const MatrixField&) const = default;

 private:
  GridSpec grid_;
  int m_ = 0;
  std::size_t cells_ = 0;
  std::vector<double> data_;
};

MatrixField uniform_field(GridSpec grid, const SquareMatrix& value);

/// max over cells of the Frobenius norm.
double sup_frob_norm(const MatrixField& u);

/// h^d sum_cells [ eps^2/2 sum_a ||forward difference_a U||_F^2 + 1/4 ||U^T U - I||_F^2 ].
double discrete_energy(const MatrixField& u, double epsilon);

/// (h^d sum_cells ||a - b||_F^2)^(1/2).
double l2_distance(const MatrixField& a, const MatrixField& b);
/// max over cells of ||a - b||_F.
double linf_distance(const MatrixField& a, const MatrixField& b);

/// Per-cell determinant, as a flat array in cell order.
std::vector<double> determinant_field(const MatrixField& u);

}  // namespace mac
