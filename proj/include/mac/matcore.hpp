#pragma once

// Small dense matrix algebra for the pointwise state of a matrix field.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace mac {

/// Largest matrix dimension supported by the pointwise kernels.
inline constexpr int kMaxMatrixDim = 8;

/// Dense m x m real matrix stored row-major.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(int m);
  SquareMatrix(int m, std::initializer_list<double> row_major);
  SquareMatrix(int m, std::span<const double> row_major);

  static SquareMatrix identity(int m);
  static SquareMatrix diagonal(std::span<const double> diag);

  int dim() const { return m_; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * m_ + j)]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * m_ + j)]; }

  std::span<double> data() { return a_; }
  std::span<const double> data() const { return a_; }

  SquareMatrix transposed() const;

  SquareMatrix& operator+=(const SquareMatrix& o);
  SquareMatrix& operator-=(const SquareMatrix& o);
  SquareMatrix& operator*=(double s);

  bool operator==(const SquareMatrix&) const = default;

 private:
  int m_ = 0;
  std::vector<double> a_;
};

SquareMatrix operator+(SquareMatrix a, const SquareMatrix& b);
SquareMatrix operator-(SquareMatrix a, const SquareMatrix& b);
SquareMatrix operator*(double s, SquareMatrix a);
SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b);

/// Frobenius inner product sum_ij a_ij b_ij.
double frob_dot(const SquareMatrix& a, const SquareMatrix& b);
double frob_norm(const SquareMatrix& a);
double determinant(const SquareMatrix& a);

/// Allen-Cahn nonlinearity f(U) = U - U U^T U.
SquareMatrix nonlinear_f(const SquareMatrix& u);

/// Stabilized nonlinearity N[U] = kappa U + f(U).
SquareMatrix stabilized_n(const SquareMatrix& u, double kappa);

/// Pointwise potential <F(U), I>_F = 1/4 ||U^T U - I||_F^2.
double potential_trace(const SquareMatrix& u);

/// A = p * diag(sigma) * q with p, q orthogonal and sigma non-increasing, non-negative.
struct SvdTriple {
  SquareMatrix p;
  std::vector<double> sigma;
  SquareMatrix q;
};

/// One-sided Jacobi SVD for m <= kMaxMatrixDim. Throws NumericError if the
/// sweep cap is hit.
SvdTriple svd_small(const SquareMatrix& a);

/// Frobenius-nearest orthogonal matrix p * q. Throws DegenerateProjectionError
/// when the smallest singular value is below 1e-12 ||a||_F.
SquareMatrix project_orthogonal(const SquareMatrix& a);

std::string to_string(const SquareMatrix& a);

namespace kernels {

// Raw kernels on row-major m x m buffers. Used by the field loops, where
// allocating a SquareMatrix per cell would dominate the cost.

/// out = kappa u + u - u (u^T u). out must not alias u.
void stabilized_n(std::span<const double> u, int m, double kappa, std::span<double> out);
double potential_trace(std::span<const double> u, int m);
double frob_norm_sq(std::span<const double> u);
double determinant(std::span<const double> u, int m);

}  // namespace kernels

}  // namespace mac
