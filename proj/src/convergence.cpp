#include "mac/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mac/errors.hpp"

namespace mac {

bool ConvergenceReport::any_failed() const {
  return std::any_of(failed.begin(), failed.end(), [](bool f) { return f; });
}

std::vector<double> observed_rates(std::span<const double> taus, std::span<const double> errors) {
  if (taus.size() != errors.size()) throw std::invalid_argument("taus and errors differ in length");
  std::vector<double> rates;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
    rates.push_back(std::log(errors[k] / errors[k + 1]) / std::log(taus[k] / taus[k + 1]));
  }
  return rates;
}

MatrixField reference_solution(const MatrixField& u0, const ConvergenceSetup& setup, double reference_tau) {
  return integrate(Scheme::etdrk2, u0, setup.kappa, setup.epsilon, reference_tau, setup.t_end);
}

ConvergenceReport convergence_study(Scheme scheme, const MatrixField& u0, std::span<const double> taus,
                                    const ConvergenceSetup& setup) {
  if (taus.empty()) throw std::invalid_argument("convergence study needs at least one tau");
  const double ref_tau =
      setup.reference_tau > 0.0 ? setup.reference_tau : *std::min_element(taus.begin(), taus.end()) / 100.0;
  const MatrixField reference = reference_solution(u0, setup, ref_tau);
  return convergence_study(scheme, u0, taus, setup, reference, ref_tau);
}

ConvergenceReport convergence_study(Scheme scheme, const MatrixField& u0, std::span<const double> taus,
                                    const ConvergenceSetup& setup, const MatrixField& reference,
                                    double reference_tau) {
  for (std::size_t k = 0; k + 1 < taus.size(); ++k) {
    if (!(taus[k + 1] < taus[k])) throw std::invalid_argument("tau list must be strictly decreasing");
  }
  ConvergenceReport report;
  report.scheme = scheme;
  report.reference_tau = reference_tau;
  report.taus.assign(taus.begin(), taus.end());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double tau : taus) {
    try {
      const MatrixField u = integrate(scheme, u0, setup.kappa, setup.epsilon, tau, setup.t_end);
      report.l2_errors.push_back(l2_distance(u, reference));
      report.linf_errors.push_back(linf_distance(u, reference));
      report.failed.push_back(false);
    } catch (const DivergenceError&) {
      report.l2_errors.push_back(nan);
      report.linf_errors.push_back(nan);
      report.failed.push_back(true);
    }
  }
  report.l2_rates = observed_rates(report.taus, report.l2_errors);
  report.linf_rates = observed_rates(report.taus, report.linf_errors);
  return report;
}

}  // namespace mac
