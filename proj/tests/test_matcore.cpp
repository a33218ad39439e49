#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mac/errors.hpp"
#include "mac/experiments.hpp"
#include "mac/field.hpp"
#include "mac/matcore.hpp"

using namespace mac;

namespace {

double max_abs_diff(const SquareMatrix& a, const SquareMatrix& b) { return frob_norm(a - b); }

SquareMatrix random_matrix(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> nd;
  SquareMatrix a(m);
  for (double& v : a.data()) v = nd(rng);
  return a;
}

double orthogonality_residual(const SquareMatrix& q) {
  return frob_norm(q.transposed() * q - SquareMatrix::identity(q.dim()));
}

void check_svd(const SquareMatrix& a) {
  const SvdTriple s = svd_small(a);
  const int m = a.dim();
  CHECK(orthogonality_residual(s.p) <= 1e-12);
  CHECK(frob_norm(s.q * s.q.transposed() - SquareMatrix::identity(m)) <= 1e-12);
  for (int i = 0; i < m; ++i) {
    CHECK(s.sigma[static_cast<std::size_t>(i)] >= 0.0);
    if (i > 0) CHECK(s.sigma[static_cast<std::size_t>(i - 1)] >= s.sigma[static_cast<std::size_t>(i)]);
  }
  const SquareMatrix rebuilt = s.p * SquareMatrix::diagonal(s.sigma) * s.q;
  CHECK(frob_norm(rebuilt - a) <= 1e-12 * std::max(1.0, frob_norm(a)));
}

}  // namespace

TEST_CASE("frobenius norm") {
  CHECK(frob_norm(SquareMatrix::identity(2)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(frob_norm(SquareMatrix(2, {3, 4, 0, 0})) == 5.0);
  CHECK(frob_norm(SquareMatrix(3)) == 0.0);
}

TEST_CASE("allen-cahn nonlinearity") {
  CHECK(frob_norm(nonlinear_f(SquareMatrix::identity(2))) == 0.0);
  CHECK(frob_norm(nonlinear_f(SquareMatrix(2))) == 0.0);
  CHECK(nonlinear_f(2.0 * SquareMatrix::identity(2)) == -6.0 * SquareMatrix::identity(2));

  SUBCASE("stabilized form on orthogonal input") {
    CHECK(stabilized_n(SquareMatrix::identity(2), 5.0) == 5.0 * SquareMatrix::identity(2));
    CHECK(frob_norm(stabilized_n(SquareMatrix::identity(2), 5.0)) == doctest::Approx(5.0 * std::sqrt(2.0)));
    const SquareMatrix q = rotation2(0.7);
    CHECK(max_abs_diff(stabilized_n(q, 3.5), 3.5 * q) <= 1e-15);
  }

  SUBCASE("kernel matches matrix arithmetic") {
    std::mt19937_64 rng(3);
    for (int m = 2; m <= 5; ++m) {
      const SquareMatrix u = random_matrix(rng, m);
      const SquareMatrix expected = u - u * u.transposed() * u;
      CHECK(max_abs_diff(nonlinear_f(u), expected) <= 1e-12 * frob_norm(expected));
    }
  }
}

TEST_CASE("potential") {
  CHECK(potential_trace(rotation2(1.3)) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(potential_trace(reflection2(0.2)) <= 1e-30);
  CHECK(potential_trace(SquareMatrix(2)) == 0.5);
  CHECK(potential_trace(2.0 * SquareMatrix::identity(2)) == 4.5);
}

TEST_CASE("determinant") {
  CHECK(determinant(rotation2(0.4)) == doctest::Approx(1.0));
  CHECK(determinant(reflection2(0.4)) == doctest::Approx(-1.0));
  // 4x4 against cofactor expansion along the first row
  std::mt19937_64 rng(11);
  const SquareMatrix a = random_matrix(rng, 4);
  auto minor3 = [&](int skip) {
    SquareMatrix s(3);
    for (int i = 1; i < 4; ++i)
      for (int j = 0, c = 0; j < 4; ++j)
        if (j != skip) s(i - 1, c++) = a(i, j);
    return determinant(s);
  };
  double expansion = 0.0;
  for (int j = 0; j < 4; ++j) expansion += (j % 2 ? -1.0 : 1.0) * a(0, j) * minor3(j);
  CHECK(determinant(a) == doctest::Approx(expansion).epsilon(1e-12));
}

TEST_CASE("small svd") {
  SUBCASE("identity") {
    const SvdTriple s = svd_small(SquareMatrix::identity(2));
    CHECK(s.sigma == std::vector<double>{1.0, 1.0});
    CHECK(max_abs_diff(s.p * s.q, SquareMatrix::identity(2)) <= 1e-15);
  }
  SUBCASE("diagonal sorted") {
    const SvdTriple s = svd_small(SquareMatrix(2, {0.5, 0, 0, 2}));
    CHECK(s.sigma[0] == doctest::Approx(2.0));
    CHECK(s.sigma[1] == doctest::Approx(0.5));
    check_svd(SquareMatrix(2, {0.5, 0, 0, 2}));
  }
  SUBCASE("negative entries give non-negative sigma") { check_svd(SquareMatrix(2, {-3, 0, 0, -1})); }
  SUBCASE("random inputs of every supported size") {
    std::mt19937_64 rng(42);
    for (int m = 1; m <= kMaxMatrixDim; ++m)
      for (int rep = 0; rep < 50; ++rep) check_svd(random_matrix(rng, m));
  }
  SUBCASE("rank deficient") {
    check_svd(SquareMatrix(3));
    check_svd(SquareMatrix(3, {1, 2, 3, 2, 4, 6, -1, -2, -3}));
    check_svd(SquareMatrix(2, {1e-300, 0, 0, 1}));
  }
  SUBCASE("deterministic") {
    std::mt19937_64 rng(5);
    const SquareMatrix a = random_matrix(rng, 3);
    const SvdTriple s1 = svd_small(a), s2 = svd_small(a);
    CHECK(s1.p == s2.p);
    CHECK(s1.q == s2.q);
    CHECK(s1.sigma == s2.sigma);
  }
  SUBCASE("too large") { CHECK_THROWS_AS(svd_small(SquareMatrix(9)), std::invalid_argument); }
}

TEST_CASE("orthogonal projection") {
  const SquareMatrix q = rotation2(0.9);
  CHECK(max_abs_diff(project_orthogonal(q), q) <= 1e-14);
  CHECK(max_abs_diff(project_orthogonal(SquareMatrix(2, {2, 0, 0, 0.5})), SquareMatrix::identity(2)) <= 1e-14);

  const double theta = 0.37;
  const SquareMatrix a = rotation2(theta) * SquareMatrix(2, {3, 0, 0, 2});
  CHECK(max_abs_diff(project_orthogonal(a), rotation2(theta)) <= 1e-14);

  SUBCASE("idempotent and orthogonal on random input") {
    std::mt19937_64 rng(9);
    for (int m = 2; m <= 4; ++m)
      for (int rep = 0; rep < 200; ++rep) {
        const SquareMatrix p = project_orthogonal(random_matrix(rng, m));
        CHECK(orthogonality_residual(p) <= 1e-10);
        CHECK(max_abs_diff(project_orthogonal(p), p) <= 1e-10);
      }
  }
  SUBCASE("degenerate input") {
    CHECK_THROWS_AS(project_orthogonal(SquareMatrix(2)), DegenerateProjectionError);
    CHECK_THROWS_AS(project_orthogonal(SquareMatrix(2, {1, 1, 1, 1})), DegenerateProjectionError);
  }
}

TEST_CASE("field norms") {
  const GridSpec g(2, 8);
  CHECK(sup_frob_norm(uniform_field(g, SquareMatrix::identity(2))) == doctest::Approx(std::sqrt(2.0)));

  MatrixField spike(g, 2);
  spike.set(17, 2.0 * SquareMatrix::identity(2));
  CHECK(sup_frob_norm(spike) == doctest::Approx(2.0 * std::sqrt(2.0)));

  CHECK(sup_frob_norm(init_example1(GridSpec(2, 32))) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("grid geometry") {
  const GridSpec g(3, 4);
  CHECK(g.cell_count() == 64);
  CHECK(g.h() * g.n == 1.0);
  const auto c = g.coords(g.index({1, 2, 3}));
  CHECK(c == std::array<int, 3>{1, 2, 3});
  CHECK(g.forward_neighbor(g.index({3, 0, 0}), 0) == g.index({0, 0, 0}));
  CHECK(g.cell_center(0)[0] == doctest::Approx(-0.5 + 0.125));
  CHECK_THROWS(GridSpec(4, 8));
  CHECK_THROWS(GridSpec(2, 0));
}

TEST_CASE("discrete energy") {
  CHECK(discrete_energy(uniform_field(GridSpec(2, 16), rotation2(0.3)), 0.01) <= 1e-14);
  CHECK(discrete_energy(MatrixField(GridSpec(2, 16), 2), 0.01) == doctest::Approx(0.5).epsilon(1e-15));

  SUBCASE("matches brute-force summation") {
    // rotation by 2 pi x varying along the first axis only
    const int n = 64;
    const GridSpec g(2, n);
    const double eps = 0.05;
    MatrixField u(g, 2);
    for (std::size_t c = 0; c < u.cell_count(); ++c) u.set(c, rotation2(2.0 * std::numbers::pi * g.cell_center(c)[0]));

    // Oracle: explicit double loop over lattice points, wrap by modulo.
    const double h = 1.0 / n;
    auto value = [&](int i, int j) {
      const double x = -0.5 + (i + 0.5) * h;
      (void)j;
      const double a = 2.0 * std::numbers::pi * x;
      return std::array<double, 4>{std::cos(a), -std::sin(a), std::sin(a), std::cos(a)};
    };
    double total = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const auto here = value(i, j);
        const auto right = value((i + 1) % n, j);
        const auto up = value(i, (j + 1) % n);
        double grad = 0.0;
        for (int e = 0; e < 4; ++e) {
          grad += std::pow((right[e] - here[e]) / h, 2) + std::pow((up[e] - here[e]) / h, 2);
        }
        // U^T U - I for a 2x2 stored row-major
        const double g00 = here[0] * here[0] + here[2] * here[2] - 1.0;
        const double g01 = here[0] * here[1] + here[2] * here[3];
        const double g11 = here[1] * here[1] + here[3] * here[3] - 1.0;
        const double pot = 0.25 * (g00 * g00 + 2 * g01 * g01 + g11 * g11);
        total += h * h * (0.5 * eps * eps * grad + pot);
      }
    CHECK(discrete_energy(u, eps) == doctest::Approx(total).epsilon(1e-12));
  }

  SUBCASE("non-negative on random fields") {
    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 20; ++rep) {
      MatrixField u(GridSpec(2, 6), 3);
      for (std::size_t c = 0; c < u.cell_count(); ++c) u.set(c, random_matrix(rng, 3));
      CHECK(discrete_energy(u, 0.1) >= 0.0);
    }
  }
}

TEST_CASE("field distances") {
  const GridSpec g(2, 4);
  const MatrixField a = uniform_field(g, SquareMatrix::identity(2));
  MatrixField b = a;
  b.set(5, SquareMatrix(2, {1, 0, 0, 3}));
  CHECK(linf_distance(a, b) == doctest::Approx(2.0));
  CHECK(l2_distance(a, b) == doctest::Approx(std::sqrt(4.0 / 16.0)));
  CHECK(l2_distance(a, a) == 0.0);
}
