#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mac/field.hpp"
#include "mac/sink.hpp"
#include "mac/spectral.hpp"

namespace mac {

enum class Scheme { etd1, etdrk2 };

std::string_view to_string(Scheme s);
/// Accepts "etd1" / "etdrk2" (case-insensitive). Throws std::invalid_argument.
Scheme parse_scheme(std::string_view text);

/// Append-only series of monitor records with strictly increasing time.
class MonitorSeries {
 public:
  void append(const MonitorRecord& r);
  const std::vector<MonitorRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

 private:
  std::vector<MonitorRecord> records_;
};

/// Current iterate U^n plus everything needed to advance it.
class SolverState {
 public:
  SolverState(MatrixField u0, double kappa, double epsilon, double tau);

  const MatrixField& field() const { return u_; }
  std::int64_t step_index() const { return step_; }
  double time() const { return time_; }
  double kappa() const { return tables_.kappa; }
  double epsilon() const { return tables_.epsilon; }
  double tau() const { return tables_.tau; }
  const PropagatorTables& tables() const { return tables_; }

  /// Rebuilds the propagator for a different step size (e.g. a final partial step).
  void set_tau(double tau);

 private:
  friend void etd1_step(SolverState&);
  friend void etdrk2_step(SolverState&, bool);

  void apply_nonlinearity(const MatrixField& in, MatrixField& out) const;
  /// tilde_hat = a * fft(u) + b * fft(N[u]); leaves N[u] in nonlin_.
  void predictor_modes();
  void commit(std::int64_t steps_taken);

  MatrixField u_;
  FftEngine fft_;
  PropagatorTables tables_;
  std::int64_t step_ = 0;
  double time_ = 0.0;
  double base_time_ = 0.0;
  std::int64_t base_step_ = 0;

  MatrixField nonlin_;
  MatrixField work_;
  // Modes of u_; after a step they are the modes the new field was synthesized from.
  ModeField u_hat_;
  bool u_hat_valid_ = false;
  ModeField n_hat_;
  ModeField tilde_hat_;
};

/// U^{n+1} = e^{-tau L} U^n + tau phi1(-tau L) N[U^n]. Throws DivergenceError.
void etd1_step(SolverState& state);

/// ETD1 predictor followed by U^{n+1} = U~ + tau phi2(-tau L) (N[U~] - N[U^n]).
/// `freeze_nonlinearity` replaces N[U~] by N[U^n] (the correction then vanishes);
/// it exists for testing.
void etdrk2_step(SolverState& state, bool freeze_nonlinearity = false);

void advance(SolverState& state, Scheme scheme);

struct RunParams {
  double kappa = 5.0;
  double epsilon = 0.01;
  double tau = 0.01;
  double t_end = 1.0;
  Scheme scheme = Scheme::etdrk2;
  int monitor_stride = 1;
  std::vector<double> snapshot_times;
};

/// Number of full steps of size tau before t_end and the leftover partial step
/// (0 when tau divides t_end up to roundoff).
struct StepPlan {
  std::int64_t full_steps = 0;
  double remainder = 0.0;
};
StepPlan plan_steps(double t_end, double tau);

/// Integrates u0 from 0 to t_end, recording monitors at t = 0, every
/// `monitor_stride` steps and at t_end. Snapshots are emitted at the first
/// step time at or past each requested time.
MonitorSeries run_simulation(const RunParams& params, MatrixField u0, RunSink* sink = nullptr);

/// Integration without monitors; returns the field at t_end.
MatrixField integrate(Scheme scheme, MatrixField u0, double kappa, double epsilon, double tau, double t_end);

struct CheckResult {
  bool passed = true;
  std::optional<std::size_t> first_violation;
  /// Largest excess over the allowed bound (negative when all records pass).
  double worst_excess = 0.0;
};

/// Passes iff every sup_norm <= sqrt(m) + tol.
CheckResult check_mbp(const MonitorSeries& series, int m, double tol);
/// Passes iff every E_{k+1} - E_k <= tol * max(1, |E_0|).
CheckResult check_energy_monotone(const MonitorSeries& series, double tol);

}  // namespace mac
