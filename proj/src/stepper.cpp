#include "mac/stepper.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "mac/errors.hpp"
#include "mac/parallel.hpp"

namespace mac {

std::string_view to_string(Scheme s) { return s == Scheme::etd1 ? "etd1" : "etdrk2"; }

Scheme parse_scheme(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "etd1") return Scheme::etd1;
  if (lower == "etdrk2") return Scheme::etdrk2;
  throw std::invalid_argument(fmt::format("unknown scheme '{}' (expected etd1 or etdrk2)", text));
}

void MonitorSeries::append(const MonitorRecord& r) {
  if (!records_.empty() && !(r.t > records_.back().t)) {
    throw std::invalid_argument(
        fmt::format("monitor times must increase strictly ({} after {})", r.t, records_.back().t));
  }
  records_.push_back(r);
}

SolverState::SolverState(MatrixField u0, double kappa, double epsilon, double tau)
    : u_(std::move(u0)),
      fft_(u_.grid()),
      tables_(build_propagator(u_.grid(), kappa, epsilon, tau)),
      nonlin_(u_.grid(), u_.m()),
      work_(u_.grid(), u_.m()),
      u_hat_(u_.grid(), u_.m()),
      n_hat_(u_.grid(), u_.m()),
      tilde_hat_(u_.grid(), u_.m()) {
  if (!u_.all_finite()) throw std::invalid_argument("initial field contains non-finite values");
}

void SolverState::set_tau(double tau) {
  if (tau == tables_.tau) return;
  tables_ = build_propagator(u_.grid(), tables_.kappa, tables_.epsilon, tau);
  base_time_ = time_;
  base_step_ = step_;
}

namespace {

// Planar loop with the matrix size known at compile time.
template <int M>
void stabilized_n_planar(const MatrixField& in, MatrixField& out, double kappa) {
  constexpr int MM = M * M;
  std::array<const double*, MM> src{};
  std::array<double*, MM> dst{};
  for (int e = 0; e < MM; ++e) {
    src[static_cast<std::size_t>(e)] = in.component(e).data();
    dst[static_cast<std::size_t>(e)] = out.component(e).data();
  }
  const double diag = kappa + 1.0;
  parallel_for(in.cell_count(), [&](std::size_t c) {
    double u[MM], gram[MM];
    for (int e = 0; e < MM; ++e) u[e] = src[static_cast<std::size_t>(e)][c];
    for (int j = 0; j < M; ++j)
      for (int k = 0; k < M; ++k) {
        double s = 0.0;
        for (int i = 0; i < M; ++i) s += u[i * M + j] * u[i * M + k];
        gram[j * M + k] = s;
      }
    for (int i = 0; i < M; ++i)
      for (int k = 0; k < M; ++k) {
        double s = 0.0;
        for (int j = 0; j < M; ++j) s += u[i * M + j] * gram[j * M + k];
        dst[static_cast<std::size_t>(i * M + k)][c] = diag * u[i * M + k] - s;
      }
  });
}

}  // namespace

void SolverState::apply_nonlinearity(const MatrixField& in, MatrixField& out) const {
  const int m = in.m();
  const double kappa = tables_.kappa;
  if (m == 2) return stabilized_n_planar<2>(in, out, kappa);
  if (m == 3) return stabilized_n_planar<3>(in, out, kappa);
  parallel_for(in.cell_count(), [&](std::size_t c) {
    std::array<double, kMaxMatrixDim * kMaxMatrixDim> u{}, n{};
    const auto mm = static_cast<std::size_t>(m * m);
    in.gather(c, std::span<double>(u.data(), mm));
    kernels::stabilized_n(std::span<const double>(u.data(), mm), m, kappa, std::span<double>(n.data(), mm));
    out.scatter(c, std::span<const double>(n.data(), mm));
  });
}

void SolverState::predictor_modes() {
  if (!u_hat_valid_) fft_.forward(u_, u_hat_);
  apply_nonlinearity(u_, nonlin_);
  fft_.forward(nonlin_, n_hat_);
  const auto& a = tables_.a;
  const auto& b = tables_.b;
  parallel_for(static_cast<std::size_t>(u_.entry_count()), [&](std::size_t e) {
    const auto uh = u_hat_.component(static_cast<int>(e));
    const auto nh = n_hat_.component(static_cast<int>(e));
    auto th = tilde_hat_.component(static_cast<int>(e));
    for (std::size_t k = 0; k < th.size(); ++k) th[k] = a[k] * uh[k] + b[k] * nh[k];
  });
}

void SolverState::commit(std::int64_t steps_taken) {
  u_hat_valid_ = true;
  step_ += steps_taken;
  time_ = base_time_ + static_cast<double>(step_ - base_step_) * tables_.tau;
}

namespace {

void require_finite(const MatrixField& f, std::int64_t step) {
  if (f.all_finite()) return;
  double worst = 0.0;
  for (double v : f.raw()) {
    if (std::isnan(v)) continue;
    worst = std::max(worst, std::abs(v));
  }
  throw DivergenceError(step, worst,
                        fmt::format("non-finite values at step {} (max finite magnitude {:.6e})", step, worst));
}

}  // namespace

void etd1_step(SolverState& s) {
  s.predictor_modes();
  s.fft_.inverse(s.tilde_hat_, s.work_);
  require_finite(s.work_, s.step_ + 1);
  std::swap(s.u_, s.work_);
  std::swap(s.u_hat_, s.tilde_hat_);
  s.commit(1);
}

void etdrk2_step(SolverState& s, bool freeze_nonlinearity) {
  s.predictor_modes();
  s.fft_.inverse(s.tilde_hat_, s.work_);
  require_finite(s.work_, s.step_ + 1);

  // U^n is no longer needed (its modes live in u_hat_), so u_ holds N[U~] - N[U^n].
  if (freeze_nonlinearity) {
    std::copy(s.nonlin_.raw().begin(), s.nonlin_.raw().end(), s.u_.raw().begin());
  } else {
    s.apply_nonlinearity(s.work_, s.u_);
  }
  {
    auto diff = s.u_.raw();
    const auto base = s.nonlin_.raw();
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= base[i];
  }
  s.fft_.forward(s.u_, s.n_hat_);
  const auto& c = s.tables_.c;
  parallel_for(static_cast<std::size_t>(s.u_.entry_count()), [&](std::size_t e) {
    auto th = s.tilde_hat_.component(static_cast<int>(e));
    const auto dh = s.n_hat_.component(static_cast<int>(e));
    for (std::size_t k = 0; k < th.size(); ++k) th[k] += c[k] * dh[k];
  });
  s.fft_.inverse(s.tilde_hat_, s.u_);
  require_finite(s.u_, s.step_ + 1);
  std::swap(s.u_hat_, s.tilde_hat_);
  s.commit(1);
}

void advance(SolverState& state, Scheme scheme) {
  if (scheme == Scheme::etd1) {
    etd1_step(state);
  } else {
    etdrk2_step(state);
  }
}

StepPlan plan_steps(double t_end, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be non-negative");
  const double q = t_end / tau;
  const double nearest = std::round(q);
  if (std::abs(q - nearest) <= 1e-9 * std::max(1.0, q)) {
    return {static_cast<std::int64_t>(nearest), 0.0};
  }
  const double full = std::floor(q);
  return {static_cast<std::int64_t>(full), t_end - full * tau};
}

MonitorSeries run_simulation(const RunParams& params, MatrixField u0, RunSink* sink) {
  if (params.monitor_stride < 1) throw std::invalid_argument("monitor_stride must be >= 1");
  const StepPlan plan = plan_steps(params.t_end, params.tau);
  const std::int64_t total = plan.full_steps + (plan.remainder > 0.0 ? 1 : 0);

  std::vector<double> pending = params.snapshot_times;
  std::sort(pending.begin(), pending.end());
  std::size_t next_snapshot = 0;
  const double snap_slack = 1e-9 * params.tau;

  SolverState state(std::move(u0), params.kappa, params.epsilon, params.tau);
  MonitorSeries series;
  auto record = [&](double t) {
    const MonitorRecord r{t, sup_frob_norm(state.field()), discrete_energy(state.field(), params.epsilon)};
    series.append(r);
    if (sink) sink->monitor(r);
  };
  auto emit_snapshots = [&](double t, bool last) {
    bool emitted = false;
    while (next_snapshot < pending.size() && (pending[next_snapshot] <= t + snap_slack || last)) {
      if (pending[next_snapshot] > params.t_end + snap_slack) break;
      if (sink && !emitted) sink->snapshot(state.field(), t);
      emitted = true;
      ++next_snapshot;
    }
  };

  record(0.0);
  emit_snapshots(0.0, total == 0);
  for (std::int64_t k = 1; k <= total; ++k) {
    const bool partial = k > plan.full_steps;
    if (partial) state.set_tau(plan.remainder);
    advance(state, params.scheme);
    const bool last = k == total;
    const double t = last ? params.t_end : static_cast<double>(k) * params.tau;
    if (last || k % params.monitor_stride == 0) record(t);
    emit_snapshots(t, last);
  }
  return series;
}

MatrixField integrate(Scheme scheme, MatrixField u0, double kappa, double epsilon, double tau, double t_end) {
  const StepPlan plan = plan_steps(t_end, tau);
  SolverState state(std::move(u0), kappa, epsilon, tau);
  for (std::int64_t k = 0; k < plan.full_steps; ++k) advance(state, scheme);
  if (plan.remainder > 0.0) {
    state.set_tau(plan.remainder);
    advance(state, scheme);
  }
  return state.field();
}

CheckResult check_mbp(const MonitorSeries& series, int m, double tol) {
  CheckResult r;
  const double bound = std::sqrt(static_cast<double>(m)) + tol;
  r.worst_excess = -std::numeric_limits<double>::infinity();
  const auto& rec = series.records();
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const double excess = rec[i].sup_norm - bound;
    r.worst_excess = std::max(r.worst_excess, excess);
    if (!(excess <= 0.0) && r.passed) {
      r.passed = false;
      r.first_violation = i;
    }
  }
  return r;
}

CheckResult check_energy_monotone(const MonitorSeries& series, double tol) {
  CheckResult r;
  const auto& rec = series.records();
  r.worst_excess = -std::numeric_limits<double>::infinity();
  if (rec.empty()) return r;
  const double allowed = tol * std::max(1.0, std::abs(rec.front().energy));
  for (std::size_t i = 1; i < rec.size(); ++i) {
    const double excess = (rec[i].energy - rec[i - 1].energy) - allowed;
    r.worst_excess = std::max(r.worst_excess, excess);
    if (!(excess <= 0.0) && r.passed) {
      r.passed = false;
      r.first_violation = i;
    }
  }
  return r;
}

}  // namespace mac
