#include <doctest.h>

#include <cmath>
#include <random>

#include "mac/errors.hpp"
#include "mac/experiments.hpp"
#include "mac/stepper.hpp"

using namespace mac;

namespace {

// A single cell has no diffusion: U = u I obeys u' = u - u^3.
double logistic_exact(double u0, double t) { return u0 / std::sqrt(u0 * u0 + (1.0 - u0 * u0) * std::exp(-2.0 * t)); }

double single_cell_error(Scheme scheme, double tau) {
  const GridSpec g(1, 1);
  const MatrixField u0 = uniform_field(g, 0.5 * SquareMatrix::identity(2));
  const MatrixField u1 = integrate(scheme, u0, 2.0, 0.1, tau, 1.0);
  return std::abs(u1.at(0)(0, 0) - logistic_exact(0.5, 1.0));
}

MatrixField random_ball_field(const GridSpec& g, int m, unsigned seed) {
  MatrixSampler s(seed);
  MatrixField u(g, m);
  for (std::size_t c = 0; c < u.cell_count(); ++c) u.set(c, s.in_ball(m));
  return u;
}

class RecordingSink : public RunSink {
 public:
  std::vector<MonitorRecord> monitors;
  std::vector<double> snapshot_times;
  void monitor(const MonitorRecord& r) override { monitors.push_back(r); }
  void snapshot(const MatrixField&, double t) override { snapshot_times.push_back(t); }
};

MonitorSeries series_of(std::initializer_list<std::pair<double, double>> sup_energy) {
  MonitorSeries s;
  double t = 0.0;
  for (auto [sup, e] : sup_energy) s.append({t++, sup, e});
  return s;
}

}  // namespace

TEST_CASE("scheme names") {
  CHECK(parse_scheme("ETD1") == Scheme::etd1);
  CHECK(parse_scheme("etdrk2") == Scheme::etdrk2);
  CHECK(to_string(Scheme::etdrk2) == "etdrk2");
  CHECK_THROWS_AS(parse_scheme("rk4"), std::invalid_argument);
}

TEST_CASE("single-cell logistic ODE") {
  CHECK(logistic_exact(0.5, 1.0) == doctest::Approx(0.8433472560147415).epsilon(1e-14));
  for (Scheme scheme : {Scheme::etd1, Scheme::etdrk2}) {
    const double e1 = single_cell_error(scheme, 0.02);
    const double e2 = single_cell_error(scheme, 0.01);
    const double order = std::log2(e1 / e2);
    INFO("scheme " << to_string(scheme) << " order " << order);
    if (scheme == Scheme::etd1) CHECK(std::abs(order - 1.0) < 0.1);
    else CHECK(std::abs(order - 2.0) < 0.1);
  }
}

TEST_CASE("fixed points") {
  const GridSpec g(2, 16);
  for (Scheme scheme : {Scheme::etd1, Scheme::etdrk2}) {
    const MatrixField q = uniform_field(g, rotation2(0.8));
    CHECK(linf_distance(integrate(scheme, q, 5.0, 0.05, 0.1, 2.0), q) <= 1e-13);
    const MatrixField zero(g, 2);
    CHECK(sup_frob_norm(integrate(scheme, zero, 5.0, 0.05, 0.1, 2.0)) == 0.0);
  }
}

TEST_CASE("frozen correction reproduces the first-order scheme") {
  const GridSpec g(2, 16);
  const MatrixField u0 = init_example1(g);
  SolverState a(u0, 5.0, 0.05, 0.1);
  SolverState b(u0, 5.0, 0.05, 0.1);
  for (int i = 0; i < 10; ++i) {
    etd1_step(a);
    etdrk2_step(b, true);
  }
  CHECK(a.field() == b.field());
  CHECK(a.step_index() == 10);
  CHECK(a.time() == doctest::Approx(1.0));
}

TEST_CASE("step planning") {
  CHECK(plan_steps(1.0, 0.1).full_steps == 10);
  CHECK(plan_steps(1.0, 0.1).remainder == 0.0);
  CHECK(plan_steps(1.0, 0.3).full_steps == 3);
  CHECK(plan_steps(1.0, 0.3).remainder == doctest::Approx(0.1));
  CHECK(plan_steps(0.0, 0.1).full_steps == 0);
}

TEST_CASE("run_simulation records") {
  const GridSpec g(2, 8);
  const MatrixField u0 = init_example1(g);

  SUBCASE("t_end = 0 gives a single record") {
    RunParams p;
    p.t_end = 0.0;
    p.tau = 0.1;
    p.epsilon = 0.05;
    const MonitorSeries s = run_simulation(p, u0);
    REQUIRE(s.size() == 1);
    CHECK(s.records()[0].t == 0.0);
    CHECK(s.records()[0].sup_norm == doctest::Approx(std::sqrt(2.0)));
  }

  SUBCASE("partial final step lands on t_end") {
    RunParams p;
    p.t_end = 1.0;
    p.tau = 0.3;
    p.epsilon = 0.05;
    p.monitor_stride = 2;
    RecordingSink sink;
    const MonitorSeries s = run_simulation(p, u0, &sink);
    CHECK(s.records().back().t == 1.0);
    // t = 0, 0.6, 1.0
    CHECK(s.size() == 3);
    CHECK(sink.monitors.size() == s.size());
  }

  SUBCASE("snapshots at or after requested times") {
    RunParams p;
    p.t_end = 1.0;
    p.tau = 0.25;
    p.epsilon = 0.05;
    p.snapshot_times = {0.0, 0.3, 0.31, 1.0};
    RecordingSink sink;
    run_simulation(p, u0, &sink);
    CHECK(sink.snapshot_times == std::vector<double>{0.0, 0.5, 1.0});
  }

  SUBCASE("monitor series rejects time going backwards") {
    MonitorSeries s;
    s.append({1.0, 1.0, 1.0});
    CHECK_THROWS(s.append({1.0, 1.0, 1.0}));
  }
}

TEST_CASE("monitor checks") {
  SUBCASE("bound") {
    CHECK(check_mbp(series_of({{1.0, 0}, {1.414, 0}}), 2, 1e-9).passed);
    const CheckResult r = check_mbp(series_of({{1.0, 0}, {1.5, 0}, {1.6, 0}}), 2, 1e-9);
    CHECK_FALSE(r.passed);
    CHECK(r.first_violation == 1u);
    CHECK(r.worst_excess == doctest::Approx(1.6 - std::sqrt(2.0)));
  }
  SUBCASE("energy") {
    CHECK(check_energy_monotone(series_of({{0, 1.0}, {0, 0.9}, {0, 0.9}}), 1e-10).passed);
    const CheckResult r = check_energy_monotone(series_of({{0, 1.0}, {0, 0.9}, {0, 0.901}}), 1e-10);
    CHECK_FALSE(r.passed);
    CHECK(r.first_violation == 2u);
    CHECK(check_energy_monotone(series_of({{0, 1.0}}), 1e-10).passed);
  }
}

TEST_CASE("determinism") {
  const GridSpec g(2, 16);
  const MatrixField u0 = init_example2(g, Example2Variant::sine);
  CHECK(integrate(Scheme::etdrk2, u0, 5.0, 0.05, 0.1, 1.0) == integrate(Scheme::etdrk2, u0, 5.0, 0.05, 0.1, 1.0));
}

TEST_CASE("bound and energy hold above the kappa thresholds") {
  const GridSpec g(2, 16);
  for (int m : {2, 3}) {
    const MatrixField u0 = random_ball_field(g, m, static_cast<unsigned>(m));
    const double kappa = energy_kappa_threshold(m);
    for (Scheme scheme : {Scheme::etd1, Scheme::etdrk2})
      for (double tau : {0.01, 1.0, 10.0}) {
        RunParams p;
        p.kappa = kappa;
        p.epsilon = 0.05;
        p.tau = tau;
        p.t_end = 30 * tau;
        p.scheme = scheme;
        const MonitorSeries s = run_simulation(p, u0);
        INFO("m=" << m << " scheme=" << to_string(scheme) << " tau=" << tau);
        CHECK(check_mbp(s, m, 1e-9).passed);
        CHECK(check_energy_monotone(s, 1e-10).passed);
      }
  }
}

TEST_CASE("divergence is reported") {
  // A huge initial value with a tiny stabilizer blows up explicitly.
  const GridSpec g(2, 4);
  const MatrixField u0 = uniform_field(g, 1e3 * SquareMatrix::identity(2));
  CHECK_THROWS_AS(integrate(Scheme::etd1, u0, 0.1, 0.05, 1.0, 50.0), DivergenceError);
}
