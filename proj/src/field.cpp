#include "mac/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "mac/parallel.hpp"

namespace mac {

GridSpec::GridSpec(int d_, int n_) : d(d_), n(n_) {
  if (d < 1 || d > 3) throw std::invalid_argument(fmt::format("grid dimension must be 1..3, got {}", d));
  if (n < 1) throw std::invalid_argument(fmt::format("cells per axis must be >= 1, got {}", n));
}

std::size_t GridSpec::cell_count() const {
  std::size_t c = 1;
  for (int a = 0; a < d; ++a) c *= static_cast<std::size_t>(n);
  return c;
}

double GridSpec::cell_volume() const { return std::pow(h(), d); }

std::array<int, 3> GridSpec::coords(std::size_t cell) const {
  std::array<int, 3> c{0, 0, 0};
  const auto nn = static_cast<std::size_t>(n);
  for (int a = d - 1; a >= 0; --a) {
    c[static_cast<std::size_t>(a)] = static_cast<int>(cell % nn);
    cell /= nn;
  }
  return c;
}

std::size_t GridSpec::index(const std::array<int, 3>& c) const {
  std::size_t idx = 0;
  for (int a = 0; a < d; ++a) idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(c[static_cast<std::size_t>(a)]);
  return idx;
}

std::size_t GridSpec::forward_neighbor(std::size_t cell, int axis) const {
  auto c = coords(cell);
  auto& ca = c[static_cast<std::size_t>(axis)];
  ca = (ca + 1) % n;
  return index(c);
}

std::array<double, 3> GridSpec::cell_center(std::size_t cell) const {
  const auto c = coords(cell);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < d; ++a) x[static_cast<std::size_t>(a)] = -0.5 + (c[static_cast<std::size_t>(a)] + 0.5) * h();
  return x;
}

MatrixField::MatrixField(GridSpec grid, int m)
    : grid_(grid), m_(m), cells_(grid.cell_count()), data_(static_cast<std::size_t>(m * m) * cells_, 0.0) {
  if (m < 1 || m > kMaxMatrixDim) {
    throw std::invalid_argument(fmt::format("matrix dimension must be 1..{}, got {}", kMaxMatrixDim, m));
  }
}

std::span<double> MatrixField::component(int e) {
  return std::span<double>(data_).subspan(static_cast<std::size_t>(e) * cells_, cells_);
}

std::span<const double> MatrixField::component(int e) const {
  return std::span<const double>(data_).subspan(static_cast<std::size_t>(e) * cells_, cells_);
}

SquareMatrix MatrixField::at(std::size_t cell) const {
  SquareMatrix a(m_);
  gather(cell, a.data());
  return a;
}

void MatrixField::set(std::size_t cell, const SquareMatrix& a) {
  if (a.dim() != m_) throw std::invalid_argument("matrix dimension does not match field");
  scatter(cell, a.data());
}

void MatrixField::gather(std::size_t cell, std::span<double> out) const {
  const int mm = m_ * m_;
  for (int e = 0; e < mm; ++e) out[static_cast<std::size_t>(e)] = data_[static_cast<std::size_t>(e) * cells_ + cell];
}

void MatrixField::scatter(std::size_t cell, std::span<const double> in) {
  const int mm = m_ * m_;
  for (int e = 0; e < mm; ++e) data_[static_cast<std::size_t>(e) * cells_ + cell] = in[static_cast<std::size_t>(e)];
}

bool MatrixField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

MatrixField uniform_field(GridSpec grid, const SquareMatrix& value) {
  MatrixField f(grid, value.dim());
  for (int e = 0; e < f.entry_count(); ++e) {
    auto c = f.component(e);
    std::fill(c.begin(), c.end(), value.data()[static_cast<std::size_t>(e)]);
  }
  return f;
}

double sup_frob_norm(const MatrixField& u) {
  double best = 0.0;
  std::array<double, kMaxMatrixDim * kMaxMatrixDim> buf{};
  const std::span<double> cell(buf.data(), static_cast<std::size_t>(u.entry_count()));
  for (std::size_t c = 0; c < u.cell_count(); ++c) {
    u.gather(c, cell);
    best = std::max(best, kernels::frob_norm_sq(cell));
  }
  return std::sqrt(best);
}

double discrete_energy(const MatrixField& u, double epsilon) {
  const GridSpec& g = u.grid();
  const int m = u.m();
  const double inv_h2 = 1.0 / (g.h() * g.h());

  // Gradient part, entry by entry; the forward difference is linear per entry.
  double grad = 0.0;
  for (int e = 0; e < u.entry_count(); ++e) {
    const auto comp = u.component(e);
    for (std::size_t c = 0; c < u.cell_count(); ++c) {
      for (int a = 0; a < g.d; ++a) {
        const double diff = comp[g.forward_neighbor(c, a)] - comp[c];
        grad += diff * diff;
      }
    }
  }
  double pot = 0.0;
  std::array<double, kMaxMatrixDim * kMaxMatrixDim> buf{};
  const std::span<double> cell(buf.data(), static_cast<std::size_t>(u.entry_count()));
  for (std::size_t c = 0; c < u.cell_count(); ++c) {
    u.gather(c, cell);
    pot += kernels::potential_trace(cell, m);
  }
  return g.cell_volume() * (0.5 * epsilon * epsilon * inv_h2 * grad + pot);
}

namespace {

void require_compatible(const MatrixField& a, const MatrixField& b) {
  if (!(a.grid() == b.grid()) || a.m() != b.m()) {
    throw std::invalid_argument("fields have different shapes");
  }
}

std::vector<double> cellwise_sq_distance(const MatrixField& a, const MatrixField& b) {
  require_compatible(a, b);
  std::vector<double> d2(a.cell_count(), 0.0);
  for (int e = 0; e < a.entry_count(); ++e) {
    const auto ca = a.component(e);
    const auto cb = b.component(e);
    for (std::size_t c = 0; c < d2.size(); ++c) {
      const double diff = ca[c] - cb[c];
      d2[c] += diff * diff;
    }
  }
  return d2;
}

}  // namespace

double l2_distance(const MatrixField& a, const MatrixField& b) {
  const auto d2 = cellwise_sq_distance(a, b);
  double s = 0.0;
  for (double v : d2) s += v;
  return std::sqrt(a.grid().cell_volume() * s);
}

double linf_distance(const MatrixField& a, const MatrixField& b) {
  const auto d2 = cellwise_sq_distance(a, b);
  return std::sqrt(d2.empty() ? 0.0 : *std::max_element(d2.begin(), d2.end()));
}

std::vector<double> determinant_field(const MatrixField& u) {
  std::vector<double> det(u.cell_count());
  parallel_for(u.cell_count(), [&](std::size_t c) {
    std::array<double, kMaxMatrixDim * kMaxMatrixDim> buf{};
    const std::span<double> cell(buf.data(), static_cast<std::size_t>(u.entry_count()));
    u.gather(c, cell);
    det[c] = kernels::determinant(cell, u.m());
  });
  return det;
}

}  // namespace mac
