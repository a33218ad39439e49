#include "mac/matcore.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "mac/errors.hpp"

namespace mac {

namespace {

constexpr double kJacobiTolerance = 1e-14;
constexpr int kJacobiSweepCap = 100;
constexpr double kDegenerateRatio = 1e-12;

using Scratch = std::array<double, kMaxMatrixDim * kMaxMatrixDim>;

void require_same_dim(const SquareMatrix& a, const SquareMatrix& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(
        fmt::format("matrix dimension mismatch: {} vs {}", a.dim(), b.dim()));
  }
}

}  // namespace

SquareMatrix::SquareMatrix(int m) : m_(m), a_(static_cast<std::size_t>(m * m), 0.0) {
  if (m < 1) throw std::invalid_argument("matrix dimension must be positive");
}

SquareMatrix::SquareMatrix(int m, std::initializer_list<double> row_major)
    : SquareMatrix(m, std::span<const double>(row_major.begin(), row_major.size())) {}

SquareMatrix::SquareMatrix(int m, std::span<const double> row_major) : SquareMatrix(m) {
  if (row_major.size() != a_.size()) {
    throw std::invalid_argument(
        fmt::format("expected {} entries for a {}x{} matrix, got {}", a_.size(), m, m,
                    row_major.size()));
  }
  std::copy(row_major.begin(), row_major.end(), a_.begin());
}

SquareMatrix SquareMatrix::identity(int m) {
  SquareMatrix r(m);
  for (int i = 0; i < m; ++i) r(i, i) = 1.0;
  return r;
}

SquareMatrix SquareMatrix::diagonal(std::span<const double> diag) {
  SquareMatrix r(static_cast<int>(diag.size()));
  for (int i = 0; i < r.dim(); ++i) r(i, i) = diag[static_cast<std::size_t>(i)];
  return r;
}

SquareMatrix SquareMatrix::transposed() const {
  SquareMatrix r(m_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

SquareMatrix& SquareMatrix::operator+=(const SquareMatrix& o) {
  require_same_dim(*this, o);
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

SquareMatrix& SquareMatrix::operator-=(const SquareMatrix& o) {
  require_same_dim(*this, o);
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
  return *this;
}

SquareMatrix& SquareMatrix::operator*=(double s) {
  for (double& v : a_) v *= s;
  return *this;
}

SquareMatrix operator+(SquareMatrix a, const SquareMatrix& b) { return a += b; }
SquareMatrix operator-(SquareMatrix a, const SquareMatrix& b) { return a -= b; }
SquareMatrix operator*(double s, SquareMatrix a) { return a *= s; }

SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
  require_same_dim(a, b);
  const int m = a.dim();
  SquareMatrix r(m);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) {
      const double aik = a(i, k);
      for (int j = 0; j < m; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

double frob_dot(const SquareMatrix& a, const SquareMatrix& b) {
  require_same_dim(a, b);
  return std::inner_product(a.data().begin(), a.data().end(), b.data().begin(), 0.0);
}

double frob_norm(const SquareMatrix& a) { return std::sqrt(kernels::frob_norm_sq(a.data())); }

double determinant(const SquareMatrix& a) { return kernels::determinant(a.data(), a.dim()); }

SquareMatrix nonlinear_f(const SquareMatrix& u) { return stabilized_n(u, 0.0); }

SquareMatrix stabilized_n(const SquareMatrix& u, double kappa) {
  if (u.dim() > kMaxMatrixDim) throw std::invalid_argument("matrix dimension exceeds kernel limit");
  SquareMatrix r(u.dim());
  kernels::stabilized_n(u.data(), u.dim(), kappa, r.data());
  return r;
}

double potential_trace(const SquareMatrix& u) {
  if (u.dim() > kMaxMatrixDim) throw std::invalid_argument("matrix dimension exceeds kernel limit");
  return kernels::potential_trace(u.data(), u.dim());
}

SvdTriple svd_small(const SquareMatrix& a) {
  const int m = a.dim();
  if (m < 1 || m > kMaxMatrixDim) {
    throw std::invalid_argument(fmt::format("svd_small supports 1 <= m <= {}, got {}", kMaxMatrixDim, m));
  }
  // Hestenes iteration: rotate columns of w = a v until they are mutually orthogonal.
  SquareMatrix w = a;
  SquareMatrix v = SquareMatrix::identity(m);
  bool converged = false;
  for (int sweep = 0; sweep < kJacobiSweepCap && !converged; ++sweep) {
    converged = true;
    for (int i = 0; i < m - 1; ++i) {
      for (int j = i + 1; j < m; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (int k = 0; k < m; ++k) {
          alpha += w(k, i) * w(k, i);
          beta += w(k, j) * w(k, j);
          gamma += w(k, i) * w(k, j);
        }
        if (gamma == 0.0 || std::abs(gamma) <= kJacobiTolerance * std::sqrt(alpha * beta)) continue;
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        for (int k = 0; k < m; ++k) {
          const double wi = w(k, i), wj = w(k, j);
          w(k, i) = c * wi - s * wj;
          w(k, j) = s * wi + c * wj;
          const double vi = v(k, i), vj = v(k, j);
          v(k, i) = c * vi - s * vj;
          v(k, j) = s * vi + c * vj;
        }
      }
    }
  }
  if (!converged) {
    throw NumericError(fmt::format("svd_small: no convergence after {} sweeps for input {}",
                                   kJacobiSweepCap, to_string(a)));
  }

  std::vector<double> norms(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    double s = 0.0;
    for (int k = 0; k < m; ++k) s += w(k, j) * w(k, j);
    norms[static_cast<std::size_t>(j)] = std::sqrt(s);
  }
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return norms[static_cast<std::size_t>(x)] > norms[static_cast<std::size_t>(y)]; });

  SvdTriple out{SquareMatrix(m), std::vector<double>(static_cast<std::size_t>(m)), SquareMatrix(m)};
  const double sigma_max = norms[static_cast<std::size_t>(order[0])];
  std::vector<bool> filled(static_cast<std::size_t>(m), false);
  for (int c = 0; c < m; ++c) {
    const int src = order[static_cast<std::size_t>(c)];
    const double sigma = norms[static_cast<std::size_t>(src)];
    out.sigma[static_cast<std::size_t>(c)] = sigma;
    for (int k = 0; k < m; ++k) out.q(c, k) = v(k, src);
    if (sigma > 0.0 && sigma > 1e-150 * sigma_max) {
      for (int k = 0; k < m; ++k) out.p(k, c) = w(k, src) / sigma;
      filled[static_cast<std::size_t>(c)] = true;
    }
  }
  // Null directions: complete p to an orthogonal basis by Gram-Schmidt on unit vectors.
  for (int c = 0; c < m; ++c) {
    if (filled[static_cast<std::size_t>(c)]) continue;
    double best_norm = -1.0;
    std::vector<double> best;
    for (int e = 0; e < m; ++e) {
      std::vector<double> cand(static_cast<std::size_t>(m), 0.0);
      cand[static_cast<std::size_t>(e)] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (int o = 0; o < m; ++o) {
          if (!filled[static_cast<std::size_t>(o)]) continue;
          double dot = 0.0;
          for (int k = 0; k < m; ++k) dot += out.p(k, o) * cand[static_cast<std::size_t>(k)];
          for (int k = 0; k < m; ++k) cand[static_cast<std::size_t>(k)] -= dot * out.p(k, o);
        }
      }
      double nrm = 0.0;
      for (double x : cand) nrm += x * x;
      if (nrm > best_norm) {
        best_norm = nrm;
        best = std::move(cand);
      }
    }
    const double inv = 1.0 / std::sqrt(best_norm);
    for (int k = 0; k < m; ++k) out.p(k, c) = best[static_cast<std::size_t>(k)] * inv;
    filled[static_cast<std::size_t>(c)] = true;
  }
  return out;
}

SquareMatrix project_orthogonal(const SquareMatrix& a) {
  const SvdTriple svd = svd_small(a);
  const double scale = frob_norm(a);
  if (scale == 0.0 || svd.sigma.back() < kDegenerateRatio * scale) {
    throw DegenerateProjectionError(
        fmt::format("orthogonal projection of a degenerate matrix (sigma_min = {:.3e}): {}",
                    svd.sigma.back(), to_string(a)));
  }
  return svd.p * svd.q;
}

std::string to_string(const SquareMatrix& a) {
  std::string s = "[";
  for (int i = 0; i < a.dim(); ++i) {
    s += i ? ",[" : "[";
    for (int j = 0; j < a.dim(); ++j) s += fmt::format("{}{:.17g}", j ? "," : "", a(i, j));
    s += "]";
  }
  return s + "]";
}

namespace kernels {

void stabilized_n(std::span<const double> u, int m, double kappa, std::span<double> out) {
  assert(m <= kMaxMatrixDim);
  Scratch gram{};
  for (int j = 0; j < m; ++j)
    for (int k = j; k < m; ++k) {
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += u[i * m + j] * u[i * m + k];
      gram[j * m + k] = s;
      gram[k * m + j] = s;
    }
  const double diag = kappa + 1.0;
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) {
      double s = 0.0;
      for (int j = 0; j < m; ++j) s += u[i * m + j] * gram[j * m + k];
      out[i * m + k] = diag * u[i * m + k] - s;
    }
}

double potential_trace(std::span<const double> u, int m) {
  double acc = 0.0;
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += u[i * m + j] * u[i * m + k];
      if (j == k) s -= 1.0;
      acc += s * s;
    }
  return 0.25 * acc;
}

double frob_norm_sq(std::span<const double> u) {
  double s = 0.0;
  for (double x : u) s += x * x;
  return s;
}

double determinant(std::span<const double> u, int m) {
  if (m == 1) return u[0];
  if (m == 2) return u[0] * u[3] - u[1] * u[2];
  if (m == 3) {
    return u[0] * (u[4] * u[8] - u[5] * u[7]) - u[1] * (u[3] * u[8] - u[5] * u[6]) +
           u[2] * (u[3] * u[7] - u[4] * u[6]);
  }
  // LU with partial pivoting
  Scratch lu{};
  std::copy(u.begin(), u.end(), lu.begin());
  double det = 1.0;
  for (int c = 0; c < m; ++c) {
    int piv = c;
    for (int r = c + 1; r < m; ++r)
      if (std::abs(lu[r * m + c]) > std::abs(lu[piv * m + c])) piv = r;
    if (lu[piv * m + c] == 0.0) return 0.0;
    if (piv != c) {
      for (int k = 0; k < m; ++k) std::swap(lu[c * m + k], lu[piv * m + k]);
      det = -det;
    }
    det *= lu[c * m + c];
    for (int r = c + 1; r < m; ++r) {
      const double f = lu[r * m + c] / lu[c * m + c];
      for (int k = c; k < m; ++k) lu[r * m + k] -= f * lu[c * m + k];
    }
  }
  return det;
}

}  // namespace kernels

}  // namespace mac
