#include "mac/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "mac/spectral.hpp"

namespace mac {

namespace {

nlohmann::json to_json(const SquareMatrix& a) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < a.dim(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < a.dim(); ++j) row.push_back(a(i, j));
    rows.push_back(row);
  }
  return rows;
}

/// Accumulates lhs - rhs over samples and remembers the first violation.
class Tally {
 public:
  Tally(std::string name, int m, double kappa, double tol) : tol_(tol) {
    check_.name = std::move(name);
    check_.m = m;
    check_.kappa = kappa;
    check_.max_slack = -std::numeric_limits<double>::infinity();
  }

  template <class Describe>
  void add(double slack, Describe&& describe) {
    ++check_.samples;
    check_.max_slack = std::max(check_.max_slack, slack);
    if (slack > tol_ || std::isnan(slack)) {
      if (check_.violations++ == 0) check_.offending_sample = describe().dump();
    }
  }

  LemmaCheck take() { return std::move(check_); }

 private:
  LemmaCheck check_;
  double tol_;
};

}  // namespace

double mbp_kappa_threshold(int m) { return std::max(1.5 * m - 1.0, 2.0); }
double energy_kappa_threshold(int m) { return 3.0 * m - 1.0; }

bool LemmaReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const LemmaCheck& c) { return c.violations == 0; });
}

MatrixSampler::MatrixSampler(std::uint64_t seed) : rng_(seed) {}

double MatrixSampler::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

SquareMatrix MatrixSampler::in_ball(int m) {
  std::normal_distribution<double> normal;
  SquareMatrix a(m);
  for (double& v : a.data()) v = normal(rng_);
  const double nrm = frob_norm(a);
  const double radius = uniform(0.0, std::sqrt(static_cast<double>(m)));
  if (nrm > 0.0) a *= radius / nrm;
  return a;
}

SquareMatrix MatrixSampler::orthogonal(int m) {
  std::normal_distribution<double> normal;
  SquareMatrix a(m);
  for (double& v : a.data()) v = normal(rng_);
  return project_orthogonal(a);
}

double potential_gap(const SquareMatrix& u1, const SquareMatrix& u2) {
  return potential_trace(u1) - potential_trace(u2) + frob_dot(u1 - u2, nonlinear_f(u2));
}

LemmaReport lemma_suite(std::span<const int> m_list, std::size_t sample_count, std::uint64_t seed, double tol) {
  if (sample_count == 0) throw std::invalid_argument("lemma suite needs at least one sample");
  MatrixSampler sampler(seed);
  LemmaReport report;

  for (const int m : m_list) {
    const double sqrt_m = std::sqrt(static_cast<double>(m));
    const double kappa_mbp = mbp_kappa_threshold(m);
    const double kappa_energy = energy_kappa_threshold(m);

    Tally bound("stabilized-bound", m, kappa_mbp, tol);
    Tally identity("singular-value-identity", m, kappa_mbp, 1e-10);
    for (std::size_t s = 0; s < sample_count; ++s) {
      const SquareMatrix v = sampler.in_ball(m);
      const SquareMatrix n = stabilized_n(v, kappa_mbp);
      const double norm_n = frob_norm(n);
      bound.add(norm_n - kappa_mbp * sqrt_m, [&] { return nlohmann::json{{"V", to_json(v)}, {"kappa", kappa_mbp}}; });

      const SvdTriple svd = svd_small(v);
      double via_sigma = 0.0;
      for (double sigma : svd.sigma) {
        const double g = (kappa_mbp + 1.0) * sigma - sigma * sigma * sigma;
        via_sigma += g * g;
      }
      const double denom = std::max(norm_n * norm_n, std::numeric_limits<double>::min());
      identity.add(std::abs(norm_n * norm_n - via_sigma) / denom,
                   [&] { return nlohmann::json{{"V", to_json(v)}, {"kappa", kappa_mbp}}; });
    }
    report.checks.push_back(bound.take());
    report.checks.push_back(identity.take());

    // The bound is attained with equality on orthogonal matrices.
    Tally equality("stabilized-bound-equality", m, kappa_mbp, 1e-10);
    for (std::size_t s = 0; s < std::min<std::size_t>(sample_count, 1000); ++s) {
      const SquareMatrix q = sampler.orthogonal(m);
      equality.add(std::abs(frob_norm(stabilized_n(q, kappa_mbp)) - kappa_mbp * sqrt_m),
                   [&] { return nlohmann::json{{"Q", to_json(q)}, {"kappa", kappa_mbp}}; });
    }
    report.checks.push_back(equality.take());

    Tally lipschitz("lipschitz", m, kappa_mbp, tol);
    const double lip = kappa_mbp + 1.0 + 5.0 * m;
    for (std::size_t s = 0; s < sample_count; ++s) {
      const SquareMatrix v1 = sampler.in_ball(m);
      SquareMatrix v2 = sampler.in_ball(m);
      if (s % 2 == 1) {
        // Nearby pairs probe the local Lipschitz constant.
        v2 = v1 + (sampler.uniform(1e-6, 1e-2) / sqrt_m) * v2;
        const double nrm = frob_norm(v2);
        if (nrm > sqrt_m) v2 *= sqrt_m / nrm;
      }
      const double lhs = frob_norm(stabilized_n(v1, kappa_mbp) - stabilized_n(v2, kappa_mbp));
      lipschitz.add(lhs - lip * frob_norm(v1 - v2),
                    [&] { return nlohmann::json{{"V1", to_json(v1)}, {"V2", to_json(v2)}, {"kappa", kappa_mbp}}; });
    }
    report.checks.push_back(lipschitz.take());

    Tally potential("potential-inequality", m, kappa_energy, tol);
    for (std::size_t s = 0; s < sample_count; ++s) {
      const SquareMatrix u1 = sampler.in_ball(m);
      const SquareMatrix u2 = sampler.in_ball(m);
      const double diff = frob_norm(u1 - u2);
      potential.add(potential_gap(u1, u2) - 0.5 * kappa_energy * diff * diff,
                    [&] { return nlohmann::json{{"U1", to_json(u1)}, {"U2", to_json(u2)}, {"kappa", kappa_energy}}; });
    }
    report.checks.push_back(potential.take());
  }

  // Scalar symbols of the energy-difference operators.
  std::vector<double> xs = {0.0, 1e-12, -1e-12, 1e-6, -1e-6, 1.0, -1.0, 3.0, -50.0, 50.0, -700.0, 700.0};
  for (std::size_t s = 0; s < sample_count; ++s) xs.push_back(sampler.uniform(-60.0, 60.0));
  Tally symbols("dissipation-symbols", 0, 0.0, tol);
  for (double x : xs) {
    const double worst = -std::min(dissipation_y1(x), dissipation_y2(x));
    symbols.add(worst, [&] { return nlohmann::json{{"x", x}}; });
  }
  report.checks.push_back(symbols.take());
  return report;
}

}  // namespace mac
