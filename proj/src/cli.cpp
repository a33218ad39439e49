#include "mac/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mac/errors.hpp"
#include "mac/experiments.hpp"
#include "mac/io.hpp"

namespace mac {

namespace {

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw std::invalid_argument(fmt::format("'{}' is not a number", s));
  return v;
}

int parse_int(const std::string& s) {
  const double v = parse_number(s);
  if (v != std::floor(v)) throw std::invalid_argument(fmt::format("'{}' is not an integer", s));
  return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

std::string format_rate(double r) { return std::isnan(r) ? "-" : fmt::format("{:.4f}", r); }

int cmd_list_examples(std::ostream& out) {
  for (const auto& e : example_catalog()) {
    std::string params;
    for (const auto& [k, v] : e.params) params += fmt::format(" {}={}", k, v);
    fmt::print(out, "{:<14} d={} m={}{}  {}\n", e.name, e.d, e.m, params, e.description);
    fmt::print(out, "{:<14} suggested: grid {}^{}, kappa={}, epsilon={}, tau={}, t_end={}\n", "", e.grid_n, e.d,
               e.kappa, e.epsilon, e.tau, e.t_end);
  }
  return kExitOk;
}

struct RunOptions {
  std::string config;
  std::string output_dir;
};

int cmd_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  ParsedConfig parsed = load_config(o.config);
  if (!o.output_dir.empty()) parsed.config.output_dir = o.output_dir;
  for (const auto& n : parsed.notices) fmt::print(err, "warning: {}\n", n.message);

  const RunOutcome r = run_config(parsed.config);
  const auto& rec = r.series.records();
  fmt::print(out, "{} records written to {}\n", rec.size(), (parsed.config.output_dir / "monitor.csv").string());
  fmt::print(out, "final t = {:.6g}, sup_frob = {:.17g}, energy = {:.17g}\n", rec.back().t, rec.back().sup_norm,
             rec.back().energy);

  bool failed = false;
  auto report = [&](const char* what, const CheckResult& c, bool expected) {
    if (c.passed) {
      fmt::print(out, "{}: ok\n", what);
      return;
    }
    const auto& bad = rec[*c.first_violation];
    fmt::print(expected ? err : out, "{}: violated at record {} (t = {:.6g}){}\n", what, *c.first_violation, bad.t,
               expected ? "" : " [hypothesis not met, informational]");
    failed = failed || expected;
  };
  report("maximum bound", r.mbp, r.mbp_expected);
  report("energy decay", r.energy, r.energy_expected);
  return failed ? kExitCheckFailed : kExitOk;
}

struct ConvergeOptions {
  std::string scheme;
  std::string example;
  int grid = 128;
  std::string taus;
  double t_end = 1.0;
  double kappa = 0.0;
  double epsilon = 0.0;
  double ref_tau = 0.0;
  double radius = 0.0;
  std::string output_dir = "output";
};

int cmd_converge(const ConvergeOptions& o, std::ostream& out, std::ostream& err) {
  const Scheme scheme = parse_scheme(o.scheme);
  const ExampleInfo& info = find_example(o.example);
  const std::vector<double> taus = parse_tau_list(o.taus);
  std::map<std::string, double> params;
  if (o.radius > 0.0) params["r"] = o.radius;

  ConvergenceSetup setup;
  setup.kappa = o.kappa > 0.0 ? o.kappa : info.kappa;
  setup.epsilon = o.epsilon > 0.0 ? o.epsilon : info.epsilon;
  setup.t_end = o.t_end;
  setup.reference_tau = o.ref_tau;
  const GridSpec grid(info.d, o.grid);
  const MatrixField u0 = make_initial_condition(info.name, grid, params);

  const ConvergenceReport rep = convergence_study(scheme, u0, taus, setup);

  fmt::print(out, "{} on {} ({}^{} grid, kappa={}, epsilon={}, t_end={}, reference ETDRK2 tau={:.6g})\n",
             to_string(scheme), info.name, o.grid, info.d, setup.kappa, setup.epsilon, setup.t_end, rep.reference_tau);
  fmt::print(out, "{:>14} {:>14} {:>8} {:>14} {:>8}\n", "tau", "L2 error", "Rate", "Linf error", "Rate");
  for (std::size_t k = 0; k < rep.taus.size(); ++k) {
    const std::string l2r = k == 0 ? "-" : format_rate(rep.l2_rates[k - 1]);
    const std::string lir = k == 0 ? "-" : format_rate(rep.linf_rates[k - 1]);
    fmt::print(out, "{:>14.6e} {:>14.4e} {:>8} {:>14.4e} {:>8}{}\n", rep.taus[k], rep.l2_errors[k], l2r,
               rep.linf_errors[k], lir, rep.failed[k] ? "  (diverged)" : "");
  }

  std::filesystem::create_directories(o.output_dir);
  const auto path = std::filesystem::path(o.output_dir) / fmt::format("convergence_{}_{}.csv", to_string(scheme), info.name);
  std::ofstream csv(path);
  if (!csv) throw IoError(path.string(), fmt::format("cannot open '{}' for writing", path.string()));
  csv << "tau,l2_error,l2_rate,linf_error,linf_rate\n";
  for (std::size_t k = 0; k < rep.taus.size(); ++k) {
    const double nan = std::nan("");
    csv << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", rep.taus[k], rep.l2_errors[k],
                       k == 0 ? nan : rep.l2_rates[k - 1], rep.linf_errors[k], k == 0 ? nan : rep.linf_rates[k - 1]);
  }
  if (!csv) throw IoError(path.string(), "write failed");
  fmt::print(out, "wrote {}\n", path.string());
  if (rep.any_failed()) {
    fmt::print(err, "one or more runs diverged\n");
    return kExitCheckFailed;
  }
  return kExitOk;
}

struct LemmaOptions {
  std::string m_list = "2,3,4";
  std::size_t samples = 10000;
  std::uint64_t seed = 7;
};

int cmd_lemmas(const LemmaOptions& o, std::ostream& out, std::ostream& err) {
  std::vector<int> ms;
  for (const auto& s : split(o.m_list, ',')) {
    const int m = parse_int(s);
    if (m < 2 || m > kMaxMatrixDim) throw std::invalid_argument(fmt::format("m must be in [2, {}]", kMaxMatrixDim));
    ms.push_back(m);
  }
  const LemmaReport rep = lemma_suite(ms, o.samples, o.seed);
  fmt::print(out, "{:<26} {:>2} {:>6} {:>8} {:>10} {:>12}\n", "check", "m", "kappa", "samples", "violations", "max slack");
  for (const auto& c : rep.checks) {
    fmt::print(out, "{:<26} {:>2} {:>6} {:>8} {:>10} {:>12.3e}\n", c.name, c.m, c.kappa, c.samples, c.violations,
               c.max_slack);
    if (c.violations > 0) fmt::print(err, "{} (m={}) first violation: {}\n", c.name, c.m, c.offending_sample);
  }
  fmt::print(out, "{}\n", rep.passed() ? "all checks passed" : "CHECK FAILED");
  return rep.passed() ? kExitOk : kExitCheckFailed;
}

}  // namespace

std::vector<double> parse_tau_list(const std::string& text) {
  std::vector<double> taus;
  if (const auto slash = text.find("/2^"); slash != std::string::npos) {
    const double base = parse_number(text.substr(0, slash));
    const std::string range = text.substr(slash + 3);
    int lo = 0, hi = 0;
    if (const auto dots = range.find(".."); dots != std::string::npos) {
      lo = parse_int(range.substr(0, dots));
      hi = parse_int(range.substr(dots + 2));
    } else {
      lo = hi = parse_int(range);
    }
    if (hi < lo) throw std::invalid_argument("tau exponent range must be increasing");
    for (int k = lo; k <= hi; ++k) taus.push_back(std::ldexp(base, -k));
  } else {
    for (const auto& s : split(text, ',')) taus.push_back(parse_number(s));
  }
  if (taus.empty()) throw std::invalid_argument("empty tau list");
  for (double t : taus) {
    if (!(t > 0.0)) throw std::invalid_argument("tau values must be positive");
  }
  return taus;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exponential time differencing solver for the matrix-valued Allen-Cahn equation", "mac-etd"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run one simulation described by a YAML config");
  run->add_option("--config", run_opts.config, "Config file")->required();
  run->add_option("--output-dir", run_opts.output_dir, "Override the config's output_dir");

  ConvergeOptions conv;
  auto* converge = app.add_subcommand("converge", "Temporal convergence study against a fine ETDRK2 reference");
  converge->add_option("--scheme", conv.scheme, "etd1 or etdrk2")->required();
  converge->add_option("--example", conv.example, "Initial condition name (see list-examples)")->required();
  converge->add_option("--grid", conv.grid, "Cells per axis")->check(CLI::PositiveNumber);
  converge->add_option("--taus", conv.taus, "Step sizes: 0.1/2^0..5 or a comma list")->required();
  converge->add_option("--t-end", conv.t_end, "Final time")->check(CLI::PositiveNumber);
  converge->add_option("--kappa", conv.kappa, "Stabilization parameter (default: example's)");
  converge->add_option("--epsilon", conv.epsilon, "Interface parameter (default: example's)");
  converge->add_option("--ref-tau", conv.ref_tau, "Reference step (default: min tau / 100)");
  converge->add_option("--radius", conv.radius, "Tube radius for example6");
  converge->add_option("--output-dir", conv.output_dir, "Directory for the CSV table");

  LemmaOptions lem;
  auto* lemmas = app.add_subcommand("lemmas", "Randomized checks of the pointwise inequalities");
  lemmas->add_option("--m", lem.m_list, "Comma-separated matrix dimensions");
  lemmas->add_option("--samples", lem.samples, "Samples per check")->check(CLI::PositiveNumber);
  lemmas->add_option("--seed", lem.seed, "RNG seed");

  auto* list = app.add_subcommand("list-examples", "Print the initial-condition catalog");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_opts, out, err);
    if (*converge) return cmd_converge(conv, out, err);
    if (*lemmas) return cmd_lemmas(lem, out, err);
    if (*list) return cmd_list_examples(out);
  } catch (const ConfigError& e) {
    fmt::print(err, "config error{}: {}\n", e.field().empty() ? "" : " in '" + e.field() + "'", e.what());
    return kExitUsage;
  } catch (const IoError& e) {
    fmt::print(err, "io error: {}\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const DivergenceError& e) {
    fmt::print(err, "diverged: {}\n", e.what());
    return kExitCheckFailed;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitCheckFailed;
  }
  return kExitUsage;
}

}  // namespace mac
