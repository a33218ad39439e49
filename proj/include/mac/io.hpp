#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mac/field.hpp"
#include "mac/sink.hpp"
#include "mac/stepper.hpp"

namespace mac {

struct InitialConditionSpec {
  std::string name = "example1";
  std::map<std::string, double> params;

  bool operator==(const InitialConditionSpec&) const = default;
};

/// One simulation run.
struct SimConfig {
  GridSpec grid{2, 256};
  int m = 2;
  double epsilon = 0.01;
  double kappa = 5.0;
  double tau = 0.01;
  double t_end = 50.0;
  Scheme scheme = Scheme::etdrk2;
  InitialConditionSpec initial_condition;
  int monitor_stride = 1;
  std::vector<double> snapshot_times;
  std::filesystem::path output_dir = "output";

  bool operator==(const SimConfig&) const = default;
};

/// A hypothesis of the MBP / energy results that the configuration does not meet.
struct ConfigNotice {
  std::string field;
  std::string message;
};

struct ParsedConfig {
  SimConfig config;
  std::vector<ConfigNotice> notices;
};

/// Parses the YAML text of a run configuration. Unknown keys are errors.
/// Throws ConfigError (with line information for syntax errors).
ParsedConfig parse_config(std::string_view text);
ParsedConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const SimConfig& config);

/// Checks value constraints; returns hypothesis warnings.
std::vector<ConfigNotice> validate_config(const SimConfig& config);

// ---------------------------------------------------------------------------
// Output formats

void write_monitor_csv(const MonitorSeries& series, const std::filesystem::path& path);
MonitorSeries read_monitor_csv(const std::filesystem::path& path);

enum class PayloadKind { field, determinant };

struct SnapshotHeader {
  int schema_version = 1;
  int d = 2;
  int n = 1;
  int m = 2;
  double t = 0.0;
  PayloadKind payload = PayloadKind::field;

  /// n^d m^2 for fields, n^d for determinants.
  std::size_t element_count() const;
};

/// Header as length-prefixed JSON (uint64 little-endian byte count), then
/// little-endian float64 values. Field payloads are cell-major (last grid
/// axis fastest) with each cell's matrix row-major.
void write_snapshot(const MatrixField& field, double t, const std::filesystem::path& path);
void write_determinant_snapshot(const GridSpec& grid, int m, std::span<const double> det, double t,
                                const std::filesystem::path& path);

struct Snapshot {
  SnapshotHeader header;
  std::vector<double> values;
};
Snapshot read_snapshot(const std::filesystem::path& path);
MatrixField snapshot_to_field(const Snapshot& snap);

/// 16-bit binary PGM of a 2D determinant field mapped linearly from
/// [-1.05, 1.05] to [0, 65535]. Rows run from the largest y down; columns follow x.
void write_determinant_pgm(const GridSpec& grid, std::span<const double> det, const std::filesystem::path& path);
std::uint16_t determinant_gray_level(double det);

/// Streams monitor.csv and writes field / determinant snapshots into a directory.
/// 2D runs also get a PGM of the determinant; 3D runs get one of the mid-plane z slice.
class DirectorySink : public RunSink {
 public:
  explicit DirectorySink(std::filesystem::path dir);
  void monitor(const MonitorRecord& record) override;
  void snapshot(const MatrixField& field, double t) override;
  const std::vector<std::filesystem::path>& written() const { return written_; }

 private:
  std::filesystem::path dir_;
  std::ofstream csv_;
  std::vector<std::filesystem::path> written_;
};

/// Snapshot file stem for time t, e.g. "t000012.500000".
std::string time_tag(double t);

struct RunOutcome {
  MonitorSeries series;
  CheckResult mbp;
  CheckResult energy;
  bool mbp_expected = false;
  bool energy_expected = false;
};

/// Builds the initial condition, runs, writes outputs and checks the monitors.
RunOutcome run_config(const SimConfig& config);

}  // namespace mac
