#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mac/field.hpp"
#include "mac/stepper.hpp"

namespace mac {

// ---------------------------------------------------------------------------
// Initial conditions

/// [[cos a, -sin a], [sin a, cos a]]
SquareMatrix rotation2(double alpha);
/// [[cos a, sin a], [sin a, -cos a]]
SquareMatrix reflection2(double alpha);

enum class Example2Variant { zero, sine };

/// Rotation by 1 + (pi/2) sin(2 pi (x + y)).
MatrixField init_example1(const GridSpec& grid);
/// Rotation where |x - y| < 0.5, reflection elsewhere.
MatrixField init_example2(const GridSpec& grid, Example2Variant variant);
/// Rotation(alpha1) where |x| > 0.25, reflection(alpha2) elsewhere. `which_case` in {1, 2, 3}.
MatrixField init_example3(const GridSpec& grid, int which_case);
/// Rotation where xy <= 0, reflection elsewhere, alpha = (pi/2) sin(2 pi x) sin(2 pi y).
MatrixField init_example4(const GridSpec& grid);
/// Projected 3x3 data around a single torus.
MatrixField init_example5(const GridSpec& grid);
/// Three interlocked tori of tube radius r.
MatrixField init_example6(const GridSpec& grid, double r);

/// The two unprojected 3x3 branches shared by the 3D examples.
SquareMatrix ring_matrix_inside(double alpha);
SquareMatrix ring_matrix_outside(double alpha);
bool in_ring_example5(double x, double y, double z);
bool in_rings_example6(double x, double y, double z, double r);

struct ExampleInfo {
  std::string name;
  std::string description;
  int d = 2;
  int m = 2;
  /// Recognised parameters with their default values.
  std::map<std::string, double> params;
  // Suggested run settings.
  int grid_n = 256;
  double kappa = 5.0;
  double epsilon = 0.01;
  double tau = 0.01;
  double t_end = 50.0;
};

const std::vector<ExampleInfo>& example_catalog();
/// Throws std::invalid_argument for an unknown name.
const ExampleInfo& find_example(std::string_view name);

/// Builds a named initial condition. Unknown parameter names are rejected.
MatrixField make_initial_condition(std::string_view name, const GridSpec& grid,
                                   const std::map<std::string, double>& params = {});

// ---------------------------------------------------------------------------
// Temporal convergence

struct ConvergenceReport {
  Scheme scheme = Scheme::etd1;
  double reference_tau = 0.0;
  std::vector<double> taus;
  std::vector<double> l2_errors;
  std::vector<double> linf_errors;
  /// log(e_k / e_{k+1}) / log(tau_k / tau_{k+1}); one fewer than errors.
  std::vector<double> l2_rates;
  std::vector<double> linf_rates;
  /// Set when the run for taus[k] diverged; its errors are NaN.
  std::vector<bool> failed;

  bool any_failed() const;
};

struct ConvergenceSetup {
  double kappa = 5.0;
  double epsilon = 0.01;
  double t_end = 1.0;
  /// Reference step; 0 selects min(taus) / 100.
  double reference_tau = 0.0;
};

/// Reference solution: ETDRK2 on the same grid at the reference step.
MatrixField reference_solution(const MatrixField& u0, const ConvergenceSetup& setup, double reference_tau);

ConvergenceReport convergence_study(Scheme scheme, const MatrixField& u0, std::span<const double> taus,
                                    const ConvergenceSetup& setup);
/// Same, against a precomputed reference field.
ConvergenceReport convergence_study(Scheme scheme, const MatrixField& u0, std::span<const double> taus,
                                    const ConvergenceSetup& setup, const MatrixField& reference,
                                    double reference_tau);

/// Observed order from consecutive (tau, error) pairs.
std::vector<double> observed_rates(std::span<const double> taus, std::span<const double> errors);

// ---------------------------------------------------------------------------
// Sampled checks of the pointwise inequalities behind the MBP and energy results

struct LemmaCheck {
  std::string name;
  int m = 0;
  double kappa = 0.0;
  std::size_t samples = 0;
  std::size_t violations = 0;
  /// max over samples of (lhs - rhs); <= tol means the inequality held.
  double max_slack = 0.0;
  /// JSON description of the first violating sample, empty when none.
  std::string offending_sample;
};

struct LemmaReport {
  std::vector<LemmaCheck> checks;
  bool passed() const;
};

/// kappa thresholds: max(3m/2 - 1, 2) for the bound / MBP, 3m - 1 for energy.
double mbp_kappa_threshold(int m);
double energy_kappa_threshold(int m);

/// Normal entries rescaled to a Frobenius radius drawn uniformly from [0, sqrt(m)].
class MatrixSampler {
 public:
  explicit MatrixSampler(std::uint64_t seed);
  SquareMatrix in_ball(int m);
  SquareMatrix orthogonal(int m);
  double uniform(double lo, double hi);

 private:
  std::mt19937_64 rng_;
};

LemmaReport lemma_suite(std::span<const int> m_list, std::size_t sample_count, std::uint64_t seed,
                        double tol = 1e-12);

/// <F(U1) - F(U2), I>_F + <U1 - U2, f(U2)>_F, the left side of the potential inequality.
double potential_gap(const SquareMatrix& u1, const SquareMatrix& u2);

}  // namespace mac
