#include "mac/experiments.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace mac {

namespace {

constexpr double kPi = std::numbers::pi;

void require_shape(const GridSpec& grid, int d, std::string_view example) {
  if (grid.d != d) {
    throw std::invalid_argument(fmt::format("{} needs a {}D grid, got d = {}", example, d, grid.d));
  }
}

template <class Fn>
MatrixField fill_field(const GridSpec& grid, int m, Fn&& at_point) {
  MatrixField f(grid, m);
  for (std::size_t c = 0; c < f.cell_count(); ++c) {
    const auto x = grid.cell_center(c);
    f.set(c, at_point(x[0], x[1], x[2]));
  }
  return f;
}

}  // namespace

SquareMatrix rotation2(double alpha) {
  const double c = std::cos(alpha), s = std::sin(alpha);
  return SquareMatrix(2, {c, -s, s, c});
}

SquareMatrix reflection2(double alpha) {
  const double c = std::cos(alpha), s = std::sin(alpha);
  return SquareMatrix(2, {c, s, s, -c});
}

MatrixField init_example1(const GridSpec& grid) {
  require_shape(grid, 2, "example1");
  return fill_field(grid, 2, [](double x, double y, double) {
    return rotation2(1.0 + 0.5 * kPi * std::sin(2.0 * kPi * (x + y)));
  });
}

MatrixField init_example2(const GridSpec& grid, Example2Variant variant) {
  require_shape(grid, 2, "example2");
  return fill_field(grid, 2, [variant](double x, double y, double) {
    const double alpha = variant == Example2Variant::zero ? 0.0 : 0.5 * kPi * std::sin(2.0 * kPi * (x + y));
    return std::abs(x - y) < 0.5 ? rotation2(alpha) : reflection2(alpha);
  });
}

MatrixField init_example3(const GridSpec& grid, int which_case) {
  require_shape(grid, 2, "example3");
  double k1 = 0.0, k2 = 0.0;
  switch (which_case) {
    case 1: k1 = 2.0; k2 = 4.0; break;
    case 2: k1 = 2.0; k2 = 8.0; break;
    case 3: k1 = 8.0; k2 = 2.0; break;
    default: throw std::invalid_argument(fmt::format("example3 case must be 1, 2 or 3, got {}", which_case));
  }
  return fill_field(grid, 2, [=](double x, double y, double) {
    return std::abs(x) > 0.25 ? rotation2(k1 * kPi * y) : reflection2(k2 * kPi * y);
  });
}

MatrixField init_example4(const GridSpec& grid) {
  require_shape(grid, 2, "example4");
  return fill_field(grid, 2, [](double x, double y, double) {
    const double alpha = 0.5 * kPi * std::sin(2.0 * kPi * x) * std::sin(2.0 * kPi * y);
    return x * y <= 0.0 ? rotation2(alpha) : reflection2(alpha);
  });
}

SquareMatrix ring_matrix_inside(double alpha) {
  const double c = std::cos(alpha), s = std::sin(alpha);
  const double r6 = std::sqrt(6.0) / 2.0, r2 = std::sqrt(2.0) / 2.0, r3 = std::sqrt(3.0) / 2.0;
  return SquareMatrix(3, {0.5 * c, r6 * c, -r2 * s,
                          0.5 * s, r6 * s, r2 * c,
                          r3, -r2, 0.0});
}

SquareMatrix ring_matrix_outside(double alpha) {
  const double c = std::cos(alpha), s = std::sin(alpha);
  const double r6 = std::sqrt(6.0) / 2.0, r2 = std::sqrt(2.0) / 2.0, r3 = std::sqrt(3.0) / 2.0;
  return SquareMatrix(3, {-0.5 * c, r6 * c, r2 * s,
                          -0.5 * s, r6 * s, -r2 * c,
                          r3, r2, 0.0});
}

bool in_ring_example5(double x, double y, double z) {
  const double t = 0.2 - std::sqrt(x * x + y * y);
  return t * t + z * z < 0.15 * 0.15;
}

bool in_rings_example6(double x, double y, double z, double r) {
  const double r2 = r * r;
  const double a = 0.15 - std::sqrt(x * x + (y + 0.21) * (y + 0.21));
  const double b = 0.2 - std::sqrt(y * y + z * z);
  const double c = 0.15 - std::sqrt(x * x + (y - 0.21) * (y - 0.21));
  return a * a + z * z < r2 || b * b + x * x < r2 || c * c + z * z < r2;
}

MatrixField init_example5(const GridSpec& grid) {
  require_shape(grid, 3, "example5");
  return fill_field(grid, 3, [](double x, double y, double z) {
    const double alpha = 2.0 * kPi * x * (y + z);
    return project_orthogonal(in_ring_example5(x, y, z) ? ring_matrix_inside(alpha) : ring_matrix_outside(alpha));
  });
}

MatrixField init_example6(const GridSpec& grid, double r) {
  require_shape(grid, 3, "example6");
  if (!(r > 0.0)) throw std::invalid_argument(fmt::format("example6 radius must be positive, got {}", r));
  return fill_field(grid, 3, [r](double x, double y, double z) {
    const double alpha = 4.0 * kPi * x * y * z;
    return project_orthogonal(in_rings_example6(x, y, z, r) ? ring_matrix_inside(alpha) : ring_matrix_outside(alpha));
  });
}

const std::vector<ExampleInfo>& example_catalog() {
  static const std::vector<ExampleInfo> catalog = [] {
    auto two_d = [](std::string name, std::string desc, double t_end) {
      ExampleInfo e;
      e.name = std::move(name);
      e.description = std::move(desc);
      e.t_end = t_end;
      return e;
    };
    auto three_d = [](std::string name, std::string desc, double t_end) {
      ExampleInfo e;
      e.name = std::move(name);
      e.description = std::move(desc);
      e.d = 3;
      e.m = 3;
      e.grid_n = 80;
      e.kappa = 8.0;
      e.tau = 0.1;
      e.t_end = t_end;
      return e;
    };
    std::vector<ExampleInfo> c;
    c.push_back(two_d("example1", "smooth rotation field, alpha = 1 + (pi/2) sin(2 pi (x + y))", 50.0));
    c.push_back(two_d("example2-zero", "rotation on |x - y| < 0.5, reflection elsewhere, alpha = 0", 500.0));
    c.push_back(two_d("example2-sine", "rotation on |x - y| < 0.5, reflection elsewhere, alpha = (pi/2) sin(2 pi (x + y))", 500.0));
    c.push_back(two_d("example3-i", "straight interfaces at |x| = 0.25, alpha1 = 2 pi y, alpha2 = 4 pi y", 2000.0));
    c.push_back(two_d("example3-ii", "straight interfaces at |x| = 0.25, alpha1 = 2 pi y, alpha2 = 8 pi y", 500.0));
    c.push_back(two_d("example3-iii", "straight interfaces at |x| = 0.25, alpha1 = 8 pi y, alpha2 = 2 pi y", 500.0));
    c.push_back(two_d("example4", "rotation where xy <= 0, reflection elsewhere, alpha = (pi/2) sin(2 pi x) sin(2 pi y)", 500.0));
    c.push_back(three_d("example5", "3D ring (torus of radii 0.2 / 0.15), alpha = 2 pi x (y + z)", 400.0));
    auto e6 = three_d("example6", "three interlocked tori of tube radius r, alpha = 4 pi x y z", 200.0);
    e6.params["r"] = 0.06;
    c.push_back(e6);
    return c;
  }();
  return catalog;
}

const ExampleInfo& find_example(std::string_view name) {
  for (const auto& e : example_catalog())
    if (e.name == name) return e;
  throw std::invalid_argument(fmt::format("unknown example '{}'", name));
}

MatrixField make_initial_condition(std::string_view name, const GridSpec& grid,
                                   const std::map<std::string, double>& params) {
  const ExampleInfo& info = find_example(name);
  std::map<std::string, double> p = info.params;
  for (const auto& [key, value] : params) {
    if (!info.params.contains(key)) {
      throw std::invalid_argument(fmt::format("example '{}' has no parameter '{}'", name, key));
    }
    p[key] = value;
  }
  if (name == "example1") return init_example1(grid);
  if (name == "example2-zero") return init_example2(grid, Example2Variant::zero);
  if (name == "example2-sine") return init_example2(grid, Example2Variant::sine);
  if (name == "example3-i") return init_example3(grid, 1);
  if (name == "example3-ii") return init_example3(grid, 2);
  if (name == "example3-iii") return init_example3(grid, 3);
  if (name == "example4") return init_example4(grid);
  if (name == "example5") return init_example5(grid);
  return init_example6(grid, p.at("r"));
}

}  // namespace mac
